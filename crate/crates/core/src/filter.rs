//! Box-filter machinery and the spatial-domain detail-injection methods
//! (HPFA, HFA, HFM).
//!
//! All convolutions use clamp-to-edge borders and accumulate kernel taps in
//! row-major order, so results are bit-reproducible.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arithmetic::FusionInput;
use crate::error::{Error, Result};
use crate::raster::{Band, MultiBandImage};

/// Default box size.
pub const DEFAULT_KERNEL_SIZE: usize = 3;

/// Low-pass magnitudes below this are treated as a flat PAN in HFM.
pub const HFM_EPSILON: f64 = 1e-9;

/// Square convolution kernel with an explicit scalar normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
    normalization: f64,
}

/// Whether the high-pass box carries the `1/n²` prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HpfNormalization {
    /// `1/n²` prefactor; equal to `P - P_LPF`.
    #[default]
    Normalized,
    /// Raw `-1 / (n²-1)` weights; `n²` times larger.
    Unnormalized,
}

fn check_size(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::arg(format!("kernel size must be odd and >= 3, got {n}")));
    }
    Ok(())
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>, normalization: f64) -> Result<Self> {
        check_size(size)?;
        if weights.len() != size * size {
            return Err(Error::arg(format!("{size}x{size} kernel needs {} weights", size * size)));
        }
        if !normalization.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::data("kernel weights must be finite"));
        }
        Ok(Kernel { size, weights, normalization })
    }

    /// Box average: all ones, scaled by `1/n²`.
    pub fn lowpass(n: usize) -> Result<Self> {
        check_size(n)?;
        Kernel::new(n, vec![1.0; n * n], 1.0 / (n * n) as f64)
    }

    /// Box high-pass: `-1` everywhere except the centre, which is `n² - 1`.
    pub fn highpass(n: usize, normalization: HpfNormalization) -> Result<Self> {
        check_size(n)?;
        let mut weights = vec![-1.0; n * n];
        weights[n * n / 2] = (n * n - 1) as f64;
        let scale = match normalization {
            HpfNormalization::Normalized => 1.0 / (n * n) as f64,
            HpfNormalization::Unnormalized => 1.0,
        };
        Kernel::new(n, weights, scale)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }
}

/// High-boost emphasis factor `a >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostFactor(f64);

impl BoostFactor {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::arg(format!("boost factor must be finite and >= 0, got {a}")));
        }
        Ok(BoostFactor(a))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for BoostFactor {
    fn default() -> Self {
        BoostFactor(1.0)
    }
}

/// 2-D convolution with replicate padding. Output has the input's size.
pub fn convolve2d(band: &Band, kernel: &Kernel) -> Result<Band> {
    let (w, h) = band.dims();
    let n = kernel.size;
    let c = n / 2;
    let src = band.samples();
    // Pre-clamped column offsets per output column avoid branching in the hot loop.
    let col_index: Vec<usize> = (0..w)
        .flat_map(|x| (0..n).map(move |v| (x + v).saturating_sub(c).min(w - 1)))
        .collect();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let rows: Vec<&[f64]> = (0..n)
            .map(|u| {
                let yy = (y + u).saturating_sub(c).min(h - 1);
                &src[yy * w..(yy + 1) * w]
            })
            .collect();
        for x in 0..w {
            let cols = &col_index[x * n..(x + 1) * n];
            let mut acc = 0.0;
            for (u, row) in rows.iter().enumerate() {
                let wrow = &kernel.weights[u * n..(u + 1) * n];
                for (v, &cx) in cols.iter().enumerate() {
                    acc += wrow[v] * row[cx];
                }
            }
            out.push(kernel.normalization * acc);
        }
    }
    Band::from_vec(w, h, out)
}

/// Box-average smoothing, `P_LPF`.
pub fn lowpass(pan: &Band, n: usize) -> Result<Band> {
    convolve2d(pan, &Kernel::lowpass(n)?)
}

/// Box high-pass, `P_HPF`.
pub fn highpass(pan: &Band, n: usize, normalization: HpfNormalization) -> Result<Band> {
    convolve2d(pan, &Kernel::highpass(n, normalization)?)
}

/// `P - P_LPF`.
pub fn unsharp_mask(pan: &Band, n: usize) -> Result<Band> {
    pan.zip_map(&lowpass(pan, n)?, |p, l| p - l)
}

/// `a * P - P_LPF`; `a = 1` is exactly [`unsharp_mask`].
pub fn high_boost(pan: &Band, a: BoostFactor, n: usize) -> Result<Band> {
    let a = a.get();
    pan.zip_map(&lowpass(pan, n)?, |p, l| a * p - l)
}

fn add_detail(ms: &MultiBandImage, detail: &Band, f: impl Fn(f64, f64) -> f64) -> Result<MultiBandImage> {
    ms.map_bands(|band| band.zip_map(detail, &f))
}

/// High-pass filter additive: `F_k = (M_k + P_HPF) / 2`.
pub fn fuse_hpfa(input: FusionInput<'_>, n: usize, normalization: HpfNormalization) -> Result<MultiBandImage> {
    let detail = highpass(input.pan(), n, normalization)?;
    add_detail(input.ms(), &detail, |m, d| (m + d) / 2.0)
}

/// High-frequency addition: `F_k = M_k + P_USM`.
pub fn fuse_hfa(input: FusionInput<'_>, n: usize) -> Result<MultiBandImage> {
    let detail = unsharp_mask(input.pan(), n)?;
    add_detail(input.ms(), &detail, |m, d| m + d)
}

/// HFA with the high-boost detail `a * P - P_LPF` in place of the unsharp mask.
pub fn fuse_hfa_boosted(input: FusionInput<'_>, a: BoostFactor, n: usize) -> Result<MultiBandImage> {
    let detail = high_boost(input.pan(), a, n)?;
    add_detail(input.ms(), &detail, |m, d| m + d)
}

/// The modulation band `P / P_LPF`, with `1.0` where `P_LPF < HFM_EPSILON`.
pub fn modulation_ratio(pan: &Band, n: usize) -> Result<Band> {
    if let Some(i) = pan.samples().iter().position(|&p| p < 0.0) {
        return Err(Error::data(format!("negative PAN sample at index {i}")));
    }
    pan.zip_map(&lowpass(pan, n)?, |p, l| if l < HFM_EPSILON { 1.0 } else { p / l })
}

/// High-frequency modulation: `F_k = M_k * P / P_LPF`.
pub fn fuse_hfm(input: FusionInput<'_>, n: usize) -> Result<MultiBandImage> {
    let ratio = modulation_ratio(input.pan(), n)?;
    add_detail(input.ms(), &ratio, |m, r| m * r)
}
