//! Raster containers and the radiometric plumbing shared by every fusion
//! method: nearest-neighbour resampling, 8-bit quantization, histograms and
//! CDF histogram matching.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Number of grey levels used by histogram operations.
pub const LEVELS: usize = 256;

/// One 2-D grid of digital numbers, stored row-major.
///
/// Every sample is finite; constructors reject NaN and infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl Band {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::arg(format!("band dimensions must be >= 1, got {width}x{height}")));
        }
        if samples.len() != width * height {
            return Err(Error::arg(format!(
                "band {width}x{height} needs {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("non-finite sample at index {i}")));
        }
        Ok(Band { width, height, samples })
    }

    /// A band holding `value` everywhere.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Band::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds a band by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut samples = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Band::new(width, height, samples)
    }

    /// Builds a band from nested rows. Convenient for small literal grids.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(Error::arg("ragged rows"));
        }
        let samples = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Band::new(width, height, samples)
    }

    // Callers guarantee the length; finiteness is still checked.
    pub(crate) fn from_vec(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(samples.len(), width * height);
        Band::new(width, height, samples)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a band has at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Sample at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<Band> {
        Band::from_vec(self.width, self.height, self.samples.iter().copied().map(f).collect())
    }

    /// Combines two equally sized bands sample by sample.
    pub fn zip_map(&self, other: &Band, mut f: impl FnMut(f64, f64) -> f64) -> Result<Band> {
        check_same_dims(self, other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Band::from_vec(self.width, self.height, samples)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

pub(crate) fn check_same_dims(a: &Band, b: &Band) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::arg(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// An ordered stack of equally sized bands.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiBandImage {
    bands: Vec<Band>,
}

impl MultiBandImage {
    pub fn new(bands: Vec<Band>) -> Result<Self> {
        let first = bands.first().ok_or_else(|| Error::arg("image needs at least one band"))?;
        let dims = first.dims();
        if let Some(k) = bands.iter().position(|b| b.dims() != dims) {
            return Err(Error::arg(format!(
                "band {k} is {}x{}, expected {}x{}",
                bands[k].width, bands[k].height, dims.0, dims.1
            )));
        }
        Ok(MultiBandImage { bands })
    }

    pub fn width(&self) -> usize {
        self.bands[0].width
    }

    pub fn height(&self) -> usize {
        self.bands[0].height
    }

    pub fn dims(&self) -> (usize, usize) {
        self.bands[0].dims()
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band(&self, k: usize) -> &Band {
        &self.bands[k]
    }

    pub fn into_bands(self) -> Vec<Band> {
        self.bands
    }

    /// Applies a band-wise transform, keeping the band count.
    pub fn map_bands(&self, f: impl FnMut(&Band) -> Result<Band>) -> Result<MultiBandImage> {
        MultiBandImage::new(self.bands.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

impl From<Band> for MultiBandImage {
    fn from(band: Band) -> Self {
        MultiBandImage { bands: vec![band] }
    }
}

/// Nearest-neighbour resampling with pixel-centre sampling.
///
/// Output pixel `(row, col)` copies source pixel
/// `(floor((row + 0.5) * src_h / dst_h), floor((col + 0.5) * src_w / dst_w))`.
/// Only enlargement (or identity) is accepted.
pub fn resample_nearest(ms: &MultiBandImage, target_width: usize, target_height: usize) -> Result<MultiBandImage> {
    ms.map_bands(|b| resample_band_nearest(b, target_width, target_height))
}

pub fn resample_band_nearest(band: &Band, target_width: usize, target_height: usize) -> Result<Band> {
    if target_width == 0 || target_height == 0 {
        return Err(Error::arg(format!("zero target dimension {target_width}x{target_height}")));
    }
    if target_width < band.width || target_height < band.height {
        return Err(Error::arg(format!(
            "target {target_width}x{target_height} is smaller than source {}x{}",
            band.width, band.height
        )));
    }
    // floor((i + 0.5) * s / d) == ((2i + 1) * s) / (2d) in integer arithmetic
    let cols: Vec<usize> = (0..target_width)
        .map(|j| ((2 * j + 1) * band.width) / (2 * target_width))
        .collect();
    let mut samples = Vec::with_capacity(target_width * target_height);
    for i in 0..target_height {
        let src_row = band.row(((2 * i + 1) * band.height) / (2 * target_height));
        samples.extend(cols.iter().map(|&c| src_row[c]));
    }
    Band::from_vec(target_width, target_height, samples)
}

/// Clamp-and-round policy that maps samples to integral 8-bit levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationPolicy {
    pub lo: f64,
    pub hi: f64,
}

impl Default for QuantizationPolicy {
    fn default() -> Self {
        QuantizationPolicy { lo: 0.0, hi: 255.0 }
    }
}

impl QuantizationPolicy {
    /// Clamps to `[lo, hi]` then rounds half away from zero.
    pub fn apply(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::data("cannot quantize NaN"));
        }
        Ok(libm::round(x.clamp(self.lo, self.hi)))
    }
}

pub fn quantize(band: &Band, policy: &QuantizationPolicy) -> Band {
    let samples = band
        .samples
        .iter()
        .map(|&v| libm::round(v.clamp(policy.lo, policy.hi)))
        .collect();
    Band { width: band.width, height: band.height, samples }
}

pub fn quantize_image(img: &MultiBandImage, policy: &QuantizationPolicy) -> MultiBandImage {
    MultiBandImage { bands: img.bands.iter().map(|b| quantize(b, policy)).collect() }
}

/// Linearly stretches a band recorded with `maxval` (e.g. 63 for 6-bit data)
/// onto the 0..=255 range.
pub fn rescale_to_8bit(band: &Band, maxval: u32) -> Result<Band> {
    if maxval == 0 {
        return Err(Error::arg("maxval must be positive"));
    }
    let scale = 255.0 / f64::from(maxval);
    band.map(|v| v * scale)
}

/// 256-bin tally of an 8-bit band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub counts: [u64; LEVELS],
    pub total: u64,
}

impl Histogram {
    /// Cumulative counts; `cumulative()[v]` is the number of pixels `<= v`.
    pub fn cumulative(&self) -> [u64; LEVELS] {
        let mut acc = 0;
        let mut out = [0u64; LEVELS];
        for (o, &c) in out.iter_mut().zip(self.counts.iter()) {
            acc += c;
            *o = acc;
        }
        out
    }

    pub fn probability(&self, level: usize) -> f64 {
        self.counts[level] as f64 / self.total as f64
    }
}

pub(crate) fn level_of(v: f64) -> Option<usize> {
    if (0.0..=255.0).contains(&v) && libm::trunc(v) == v {
        Some(v as usize)
    } else {
        None
    }
}

/// Histogram of a band already quantized to `{0, ..., 255}`.
pub fn histogram256(band: &Band) -> Result<Histogram> {
    let mut counts = [0u64; LEVELS];
    for (i, &v) in band.samples.iter().enumerate() {
        let level = level_of(v)
            .ok_or_else(|| Error::data(format!("sample {v} at index {i} is not an 8-bit level")))?;
        counts[level] += 1;
    }
    Ok(Histogram { counts, total: band.len() as u64 })
}

/// Reference stretch: remaps `source` so its histogram follows `reference`.
///
/// Both bands are quantized with the default policy first. Each source level
/// `v` maps to the smallest reference level `r` with
/// `CDF_ref(r) >= CDF_src(v)`; the comparison is done on integer counts so
/// it is exact.
pub fn histogram_match(source: &Band, reference: &Band) -> Result<Band> {
    if source.is_empty() || reference.is_empty() {
        return Err(Error::arg("histogram matching needs non-empty bands"));
    }
    let policy = QuantizationPolicy::default();
    let src = quantize(source, &policy);
    let src_hist = histogram256(&src)?;
    let ref_hist = histogram256(&quantize(reference, &policy))?;
    let table = matching_table(&src_hist, &ref_hist);
    let samples = src.samples.iter().map(|&v| f64::from(table[v as usize])).collect();
    Band::from_vec(src.width, src.height, samples)
}

/// Level lookup table mapping source levels onto reference levels.
pub fn matching_table(source: &Histogram, reference: &Histogram) -> [u8; LEVELS] {
    let src_cum = source.cumulative();
    let ref_cum = reference.cumulative();
    let (ns, nr) = (u128::from(source.total), u128::from(reference.total));
    let mut table = [0u8; LEVELS];
    let mut r = 0usize;
    for v in 0..LEVELS {
        // CDF_src is non-decreasing in v, so the answer is too.
        while r < LEVELS - 1 && u128::from(ref_cum[r]) * ns < u128::from(src_cum[v]) * nr {
            r += 1;
        }
        table[v] = r as u8;
    }
    table
}
