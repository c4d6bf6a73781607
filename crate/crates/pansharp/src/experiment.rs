//! Reference-based evaluation: degrade a full-resolution RGB image into a
//! synthetic PAN/MS pair, fuse with every method and score each result
//! against the original.

use std::thread;

use pansharp_core::metrics::{assess, describe, AssessMode};
use pansharp_core::raster::resample_nearest;
use pansharp_core::{fuse, Band, Error, FusionInput, FusionParams, Method, MultiBandImage};

use crate::report::Report;

/// Default resolution ratio between the simulated MS and PAN grids.
pub const DEFAULT_FACTOR: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Downsampling factor, at least 2.
    pub factor: usize,
    /// Box blur width applied before decimation; defaults to `factor`.
    pub blur: usize,
    pub methods: Vec<Method>,
    pub params: FusionParams,
    pub mode: AssessMode,
    /// Run methods on separate threads. Results do not depend on it.
    pub parallel: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            factor: DEFAULT_FACTOR,
            blur: DEFAULT_FACTOR,
            methods: Method::ALL.to_vec(),
            params: FusionParams::default(),
            mode: AssessMode::Float,
            parallel: true,
        }
    }
}

impl ExperimentSpec {
    pub fn with_factor(factor: usize) -> Self {
        ExperimentSpec { factor, blur: factor, ..ExperimentSpec::default() }
    }
}

/// Simulated inputs derived from one reference image.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    /// Reference cropped to a multiple of the factor.
    pub reference: MultiBandImage,
    /// Unweighted mean of the reference bands.
    pub pan: Band,
    /// Blurred, decimated MS at the coarse resolution.
    pub ms_low: MultiBandImage,
    /// `ms_low` brought back to the PAN grid by nearest neighbour.
    pub ms: MultiBandImage,
}

fn crop(band: &Band, w: usize, h: usize) -> Band {
    Band::from_fn(w, h, |x, y| band.get(x, y)).expect("crop of finite data")
}

/// Box-blurs with a `blur`-wide window centred on each `factor` block, then
/// keeps one sample per block. Windows are clamped at the borders.
pub fn degrade(band: &Band, factor: usize, blur: usize) -> Result<Band, Error> {
    let (w, h) = band.dims();
    let (lw, lh) = (w / factor, h / factor);
    let offset = factor as isize / 2 - blur as isize / 2;
    let area = (blur * blur) as f64;
    Band::from_fn(lw, lh, |bx, by| {
        let (x0, y0) = ((bx * factor) as isize + offset, (by * factor) as isize + offset);
        let mut acc = 0.0;
        for dy in 0..blur as isize {
            let y = (y0 + dy).clamp(0, h as isize - 1) as usize;
            for dx in 0..blur as isize {
                let x = (x0 + dx).clamp(0, w as isize - 1) as usize;
                acc += band.get(x, y);
            }
        }
        acc / area
    })
}

pub fn synthesize(reference: &MultiBandImage, factor: usize, blur: usize) -> Result<SyntheticScene, Error> {
    if factor < 2 {
        return Err(Error::InvalidArgument(format!("downsample factor must be >= 2, got {factor}")));
    }
    if blur == 0 {
        return Err(Error::InvalidArgument("blur width must be >= 1".into()));
    }
    let (w, h) = reference.dims();
    if w < factor || h < factor {
        return Err(Error::InvalidArgument(format!(
            "{w}x{h} image is too small for downsample factor {factor}"
        )));
    }
    let (cw, ch) = (w / factor * factor, h / factor * factor);
    let reference = reference.map_bands(|b| Ok(crop(b, cw, ch)))?;
    let k = reference.band_count() as f64;
    let pan = Band::from_fn(cw, ch, |x, y| reference.bands().iter().map(|b| b.get(x, y)).sum::<f64>() / k)?;
    let ms_low = reference.map_bands(|b| degrade(b, factor, blur))?;
    let ms = resample_nearest(&ms_low, cw, ch)?;
    Ok(SyntheticScene { reference, pan, ms_low, ms })
}

/// Fuses and assesses every requested method. Rows follow `spec.methods`
/// order after the ORIGIN rows; the ranking sorts methods by mean NRMSE.
pub fn run_experiment(reference: &MultiBandImage, spec: &ExperimentSpec) -> Result<Report, Error> {
    if reference.band_count() != 3 {
        return Err(Error::InvalidArgument(format!(
            "experiment needs a 3-band reference, got {} band(s)",
            reference.band_count()
        )));
    }
    let scene = synthesize(reference, spec.factor, spec.blur)?;
    let input = FusionInput::new(&scene.pan, &scene.ms)?;
    let run_one = |m: Method| -> Result<_, Error> {
        let fused = fuse(m, input, &spec.params)?;
        assess(&fused, &scene.reference, spec.mode)
    };
    let results: Vec<Result<_, Error>> = if spec.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = spec.methods.iter().map(|&m| s.spawn(move || run_one(m))).collect();
            handles.into_iter().map(|h| h.join().expect("fusion worker panicked")).collect()
        })
    } else {
        spec.methods.iter().map(|&m| run_one(m)).collect()
    };

    let mut report = Report::default();
    report.push_origin(&describe(&scene.reference));
    let mut scores = Vec::new();
    for (&m, res) in spec.methods.iter().zip(results) {
        let metrics = res?;
        let nrmse: Vec<f64> = metrics.bands.iter().filter_map(|b| b.nrmse.clone().ok()).collect();
        let mean = if nrmse.is_empty() { f64::INFINITY } else { nrmse.iter().sum::<f64>() / nrmse.len() as f64 };
        scores.push((m, mean));
        report.push_metrics(m.label(), &metrics);
    }
    // Stable sort keeps method order on ties.
    scores.sort_by(|a, b| a.1.total_cmp(&b.1));
    report.ranking = scores.into_iter().map(|(m, _)| m.label().to_string()).collect();
    Ok(report)
}
