//! `pansharp` command line: `fuse`, `metrics` and `experiment`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pansharp_core::filter::{BoostFactor, HpfNormalization};
use pansharp_core::metrics::{assess, AssessMode};
use pansharp_core::raster::resample_nearest;
use pansharp_core::{fuse, Error, FusionInput, FusionParams, Method, MultiBandImage};
use thiserror::Error;

use crate::experiment::{run_experiment, ExperimentSpec, DEFAULT_FACTOR};
use crate::pnm::{decode_any, decode_rescaled, encode_image, CodecError, ImageFormat};
use crate::report::{Report, ReportFormat};

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const FORMAT: i32 = 4;
    pub const NUMERIC: i32 = 5;
    pub const INVALID_INPUT: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: CodecError },
    #[error("{0}")]
    Numeric(Error),
    #[error("{0}")]
    InvalidInput(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Format { .. } => exit::FORMAT,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::InvalidInput(_) => exit::INVALID_INPUT,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => CliError::InvalidInput(m),
            other => CliError::Numeric(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pansharp", version, about = "Pixel-level pan-sharpening and fusion quality assessment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fuse a PAN band with a multispectral image.
    Fuse(FuseArgs),
    /// Score a fused image against a reference.
    Metrics(MetricsArgs),
    /// Degrade a reference RGB image, run every method, and compare.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// brovey, cn, mlt, hpfa, hfa, hfm or wavelet
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub pan: PathBuf,
    #[arg(long)]
    pub ms: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Odd box-filter size for hpfa/hfa/hfm.
    #[arg(long, default_value_t = 3)]
    pub kernel: usize,
    /// Wavelet decomposition depth.
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    /// High-boost factor for hfa; 1.0 is the plain unsharp mask.
    #[arg(long, default_value_t = 1.0)]
    pub boost: f64,
    /// Drop the 1/n² prefactor from the high-pass kernel.
    #[arg(long)]
    pub hpf_unnormalized: bool,
    /// Quantize fused and reference images before every index.
    #[arg(long)]
    pub metrics_on_quantized: bool,
    /// Reference MS on the PAN grid; enables the quality report.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub fused: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "json")]
    pub format: ReportFormat,
    #[arg(long)]
    pub metrics_on_quantized: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FACTOR)]
    pub factor: usize,
    /// Box blur width before decimation (defaults to the factor).
    #[arg(long)]
    pub blur: Option<usize>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "json")]
    pub format: ReportFormat,
    #[arg(long, default_value_t = 3)]
    pub kernel: usize,
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    #[arg(long)]
    pub hpf_unnormalized: bool,
    #[arg(long)]
    pub metrics_on_quantized: bool,
    /// Run methods one after another instead of concurrently.
    #[arg(long)]
    pub serial: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn mode(quantized: bool) -> AssessMode {
    if quantized {
        AssessMode::Quantized
    } else {
        AssessMode::Float
    }
}

fn fusion_params(kernel: usize, levels: usize, boost: f64, hpf_unnormalized: bool) -> Result<FusionParams, CliError> {
    if kernel < 3 || kernel.is_multiple_of(2) {
        return Err(CliError::Usage(format!("--kernel must be odd and >= 3, got {kernel}")));
    }
    if levels == 0 {
        return Err(CliError::Usage("--levels must be >= 1".into()));
    }
    let boost = BoostFactor::new(boost).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(FusionParams {
        kernel_size: kernel,
        levels,
        hpf: if hpf_unnormalized { HpfNormalization::Unnormalized } else { HpfNormalization::Normalized },
        boost,
    })
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<MultiBandImage, CliError> {
    decode_any(&read(path)?).map_err(|source| CliError::Format { path: path.to_path_buf(), source })
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(data).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn geometry(img: &MultiBandImage) -> String {
    format!("{}x{}x{}", img.width(), img.height(), img.band_count())
}

pub fn cmd_fuse(args: &FuseArgs) -> Result<(), CliError> {
    let params = fusion_params(args.kernel, args.levels, args.boost, args.hpf_unnormalized)?;
    match (&args.reference, &args.report) {
        (Some(_), None) => return Err(CliError::Usage("--reference requires --report".into())),
        (None, Some(_)) => return Err(CliError::Usage("--report requires --reference".into())),
        _ => {}
    }

    // PAN may come from a lower bit-depth sensor; stretch it onto 8 bits.
    let pan_img = decode_rescaled(&read(&args.pan)?)
        .map_err(|source| CliError::Format { path: args.pan.clone(), source })?;
    if pan_img.band_count() != 1 {
        return Err(CliError::InvalidInput(format!(
            "{}: PAN must have 1 band, found {}",
            args.pan.display(),
            pan_img.band_count()
        )));
    }
    let pan = pan_img.band(0);
    let ms = load(&args.ms)?;
    let ms = resample_nearest(&ms, pan.width(), pan.height())?;
    let fused = fuse(args.method, FusionInput::new(pan, &ms)?, &params)?;

    let report = match &args.reference {
        Some(path) => {
            let reference = load(path)?;
            let metrics = assess(&fused, &reference, mode(args.metrics_on_quantized)).map_err(|e| match e {
                Error::InvalidArgument(_) => CliError::InvalidInput(format!(
                    "fused image is {}, reference {} is {}",
                    geometry(&fused),
                    path.display(),
                    geometry(&reference)
                )),
                other => other.into(),
            })?;
            let mut r = Report::default();
            r.push_metrics(args.method.label(), &metrics);
            Some(r.render(args.format))
        }
        None => None,
    };

    let format = ImageFormat::binary_for(fused.band_count())
        .ok_or_else(|| CliError::InvalidInput(format!("cannot store {} bands", fused.band_count())))?;
    let bytes = encode_image(&fused, format).map_err(|source| CliError::Format { path: args.out.clone(), source })?;
    write_atomic(&args.out, &bytes)?;
    if let (Some(text), Some(path)) = (report, &args.report) {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(())
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let fused = load(&args.fused)?;
    let reference = load(&args.reference)?;
    if fused.dims() != reference.dims() || fused.band_count() != reference.band_count() {
        return Err(CliError::InvalidInput(format!(
            "geometry mismatch: fused {} is {}, reference {} is {}",
            args.fused.display(),
            geometry(&fused),
            args.reference.display(),
            geometry(&reference)
        )));
    }
    let metrics = assess(&fused, &reference, mode(args.metrics_on_quantized))?;
    let mut r = Report::default();
    r.push_metrics("FUSED", &metrics);
    write_atomic(&args.report, r.render(args.format).as_bytes())
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let params = fusion_params(args.kernel, args.levels, 1.0, args.hpf_unnormalized)?;
    if args.factor < 2 {
        return Err(CliError::Usage(format!("--factor must be >= 2, got {}", args.factor)));
    }
    let spec = ExperimentSpec {
        factor: args.factor,
        blur: args.blur.unwrap_or(args.factor),
        methods: Method::ALL.to_vec(),
        params,
        mode: mode(args.metrics_on_quantized),
        parallel: !args.serial,
    };
    let reference = load(&args.reference)?;
    let report = run_experiment(&reference, &spec)?;
    write_atomic(&args.report, report.render(args.format).as_bytes())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fuse(a) => cmd_fuse(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("pansharp: {e}");
            e.exit_code()
        }
    }
}
