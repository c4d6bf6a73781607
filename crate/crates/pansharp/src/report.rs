//! Quality reports: one row per (method, band), serialized as JSON keyed
//! method → band → index, or as CSV in the `Method,Band,SD,En,SNR,NRMSE,DI,CC`
//! column order.

use std::fmt::Write as _;

use indexmap::IndexMap;
use pansharp_core::metrics::{Cell, MetricsReport};
use pansharp_core::Error;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "Method,Band,SD,En,SNR,NRMSE,DI,CC";

/// Label used for the rows that describe the unfused reference.
pub const ORIGIN: &str = "ORIGIN";

/// One serialized metric value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    /// Zero-noise SNR.
    Infinite,
    /// The metric could not be computed; holds the error kind.
    Failed(String),
    /// Not applicable to this row (e.g. CC of the reference itself).
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Infinite => Some(f64::INFINITY),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Value::Number(v) => v.to_string(),
            Value::Infinite => "inf".into(),
            Value::Failed(kind) => kind.clone(),
            Value::Missing => String::new(),
        }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid-argument",
        Error::InvalidData(_) => "invalid-data",
        Error::Degenerate(_) => "degenerate",
    }
}

impl From<&Cell> for Value {
    fn from(c: &Cell) -> Self {
        match c {
            Ok(v) if v.is_infinite() && *v > 0.0 => Value::Infinite,
            Ok(v) => Value::Number(*v),
            Err(e) => Value::Failed(error_kind(e).into()),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Number(v) => s.serialize_f64(*v),
            Value::Infinite => s.serialize_str("inf"),
            Value::Failed(kind) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("error", kind)?;
                m.end()
            }
            Value::Missing => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
            Failed { error: String },
            Null(()),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Number(v) => Value::Number(v),
            Raw::Text(t) if t == "inf" => Value::Infinite,
            Raw::Text(t) => return Err(de::Error::custom(format!("unexpected metric string '{t}'"))),
            Raw::Failed { error } => Value::Failed(error),
            Raw::Null(()) => Value::Missing,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    #[serde(rename = "SD")]
    pub sd: Value,
    #[serde(rename = "En")]
    pub en: Value,
    #[serde(rename = "SNR")]
    pub snr: Value,
    #[serde(rename = "NRMSE")]
    pub nrmse: Value,
    #[serde(rename = "DI")]
    pub di: Value,
    #[serde(rename = "CC")]
    pub cc: Value,
    /// Pixels left out of DI because the reference was zero there.
    #[serde(default)]
    pub di_excluded: usize,
}

/// Report rows in method-major, band-minor order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Report {
    pub pixel_count: usize,
    /// method label → band number (1-based, as a string key) → row
    pub methods: IndexMap<String, IndexMap<String, BandRow>>,
    /// Methods ordered best first, when the report compares several.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ranking: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format '{s}' (expected json or csv)")),
        }
    }
}

impl Report {
    /// Adds the rows of one assessed image under `label`.
    pub fn push_metrics(&mut self, label: &str, metrics: &MetricsReport) {
        self.pixel_count = metrics.pixel_count;
        let rows = metrics
            .bands
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let row = BandRow {
                    sd: (&b.sd).into(),
                    en: (&b.entropy).into(),
                    snr: (&b.snr).into(),
                    nrmse: (&b.nrmse).into(),
                    di: (&b.di).into(),
                    cc: (&b.cc).into(),
                    di_excluded: b.di_excluded,
                };
                ((k + 1).to_string(), row)
            })
            .collect();
        self.methods.insert(label.to_string(), rows);
    }

    /// Adds SD/En rows describing the reference image itself.
    pub fn push_origin(&mut self, stats: &[(f64, Cell)]) {
        let rows = stats
            .iter()
            .enumerate()
            .map(|(k, (sd, en))| {
                let row = BandRow {
                    sd: Value::Number(*sd),
                    en: en.into(),
                    snr: Value::Missing,
                    nrmse: Value::Missing,
                    di: Value::Missing,
                    cc: Value::Missing,
                    di_excluded: 0,
                };
                ((k + 1).to_string(), row)
            })
            .collect();
        self.methods.insert(ORIGIN.to_string(), rows);
    }

    pub fn row(&self, method: &str, band: usize) -> Option<&BandRow> {
        self.methods.get(method)?.get(&band.to_string())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (method, bands) in &self.methods {
            for (band, r) in bands {
                let _ = writeln!(
                    out,
                    "{method},{band},{},{},{},{},{},{}",
                    r.sd.csv(),
                    r.en.csv(),
                    r.snr.csv(),
                    r.nrmse.csv(),
                    r.di.csv(),
                    r.cc.csv()
                );
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}
