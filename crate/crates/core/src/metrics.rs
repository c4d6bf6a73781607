//! Fusion quality indices computed band by band between a fused image and
//! the reference multispectral image.
//!
//! Argument order matters: `fused` first, `reference` second. Only the
//! correlation coefficient is symmetric.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{check_same_dims, histogram256, quantize, quantize_image, Band, MultiBandImage, QuantizationPolicy};

/// Population standard deviation (divisor `m * n`).
pub fn std_dev(band: &Band) -> f64 {
    let n = band.len() as f64;
    let mean = mean(band);
    let ss: f64 = band.samples().iter().map(|&v| (v - mean) * (v - mean)).sum();
    libm::sqrt(ss / n)
}

pub fn mean(band: &Band) -> f64 {
    band.samples().iter().sum::<f64>() / band.len() as f64
}

/// Shannon entropy in bits of a band quantized to 8-bit levels.
pub fn entropy(band: &Band) -> Result<f64> {
    let hist = histogram256(band)?;
    let mut en = 0.0;
    for level in 0..hist.counts.len() {
        if hist.counts[level] > 0 {
            let p = hist.probability(level);
            en -= p * libm::log2(p);
        }
    }
    Ok(en)
}

/// Pearson correlation coefficient.
pub fn correlation(fused: &Band, reference: &Band) -> Result<f64> {
    check_same_dims(fused, reference)?;
    let (mf, mr) = (mean(fused), mean(reference));
    let (mut cross, mut ff, mut rr) = (0.0, 0.0, 0.0);
    for (&f, &r) in fused.samples().iter().zip(reference.samples()) {
        let (df, dr) = (f - mf, r - mr);
        cross += df * dr;
        ff += df * df;
        rr += dr * dr;
    }
    if ff == 0.0 || rr == 0.0 {
        return Err(Error::degenerate("correlation of a constant band"));
    }
    Ok(cross / (libm::sqrt(ff) * libm::sqrt(rr)))
}

fn squared_error(fused: &Band, reference: &Band) -> Result<f64> {
    check_same_dims(fused, reference)?;
    Ok(fused.samples().iter().zip(reference.samples()).map(|(&f, &m)| (f - m) * (f - m)).sum())
}

/// `sqrt(sum F² / sum (F - M)²)`; identical bands give `f64::INFINITY`.
pub fn snr(fused: &Band, reference: &Band) -> Result<f64> {
    let noise = squared_error(fused, reference)?;
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    let signal: f64 = fused.samples().iter().map(|&f| f * f).sum();
    Ok(libm::sqrt(signal / noise))
}

/// Root-mean-square error normalized by the 8-bit full scale 255.
pub fn nrmse(fused: &Band, reference: &Band) -> Result<f64> {
    let se = squared_error(fused, reference)?;
    Ok(libm::sqrt(se / (fused.len() as f64 * 255.0 * 255.0)))
}

/// Deviation index together with the number of zero-reference pixels that
/// were left out of the average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationIndex {
    pub value: f64,
    pub excluded: usize,
}

/// Mean of `|F - M| / M` over pixels with `M > 0`.
pub fn deviation_index(fused: &Band, reference: &Band) -> Result<DeviationIndex> {
    check_same_dims(fused, reference)?;
    let (mut acc, mut used) = (0.0, 0usize);
    for (&f, &m) in fused.samples().iter().zip(reference.samples()) {
        if m > 0.0 {
            acc += (f - m).abs() / m;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::degenerate("every reference pixel is zero"));
    }
    Ok(DeviationIndex { value: acc / used as f64, excluded: fused.len() - used })
}

/// A metric value, or the reason it could not be computed.
pub type Cell = core::result::Result<f64, Error>;

/// All six indices for one band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMetrics {
    pub sd: Cell,
    pub entropy: Cell,
    pub cc: Cell,
    pub snr: Cell,
    pub nrmse: Cell,
    pub di: Cell,
    /// Pixels skipped by DI because the reference was zero.
    pub di_excluded: usize,
}

/// Per-band quality indices for one fused image.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub bands: Vec<BandMetrics>,
    pub pixel_count: usize,
}

impl MetricsReport {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }
}

/// Which samples the indices see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssessMode {
    /// Unclipped floats everywhere; entropy alone uses quantized fused data.
    #[default]
    Float,
    /// Both images quantized before every index.
    Quantized,
}

/// Computes every index for every band. Shape mismatches abort; per-metric
/// failures are recorded in the affected cell only.
pub fn assess(fused: &MultiBandImage, reference: &MultiBandImage, mode: AssessMode) -> Result<MetricsReport> {
    if fused.band_count() != reference.band_count() {
        return Err(Error::arg(format!(
            "fused has {} bands, reference has {}",
            fused.band_count(),
            reference.band_count()
        )));
    }
    if fused.dims() != reference.dims() {
        return Err(Error::arg(format!(
            "fused is {}x{}, reference is {}x{}",
            fused.width(),
            fused.height(),
            reference.width(),
            reference.height()
        )));
    }
    let policy = QuantizationPolicy::default();
    let (fused, reference) = match mode {
        AssessMode::Float => (fused.clone(), reference.clone()),
        AssessMode::Quantized => (quantize_image(fused, &policy), quantize_image(reference, &policy)),
    };
    let bands = fused
        .bands()
        .iter()
        .zip(reference.bands())
        .map(|(f, m)| {
            let di = deviation_index(f, m);
            BandMetrics {
                sd: Ok(std_dev(f)),
                entropy: entropy(&quantize(f, &policy)),
                cc: correlation(f, m),
                snr: snr(f, m),
                nrmse: nrmse(f, m),
                di_excluded: di.as_ref().map_or(0, |d| d.excluded),
                di: di.map(|d| d.value),
            }
        })
        .collect();
    Ok(MetricsReport { bands, pixel_count: fused.width() * fused.height() })
}

/// Standard deviation and entropy of each band of an unfused image.
pub fn describe(img: &MultiBandImage) -> Vec<(f64, Cell)> {
    let policy = QuantizationPolicy::default();
    img.bands().iter().map(|b| (std_dev(b), entropy(&quantize(b, &policy)))).collect()
}
