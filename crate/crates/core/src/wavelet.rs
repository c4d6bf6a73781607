//! Orthonormal 2-D Haar transform, multilevel pyramids and substitutive
//! detail-plane fusion.
//!
//! One analysis level pairs samples `(2m, 2m + 1)` along rows, then along
//! columns. Odd dimensions are padded by repeating the last row/column; the
//! pre-padding size is kept with each level and stripped on synthesis.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::arithmetic::FusionInput;
use crate::error::{Error, Result};
use crate::raster::{histogram_match, Band, MultiBandImage};

/// Haar analysis taps.
pub struct HaarFilters;

impl HaarFilters {
    pub const LOWPASS: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    pub const HIGHPASS: [f64; 2] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
}

const L: [f64; 2] = HaarFilters::LOWPASS;
const H: [f64; 2] = HaarFilters::HIGHPASS;

/// Output of one analysis step.
///
/// `horizontal` is row-lowpass/column-highpass, `vertical` is
/// row-highpass/column-lowpass, `diagonal` is highpass in both.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarLevel {
    pub approx: Band,
    pub horizontal: Band,
    pub vertical: Band,
    pub diagonal: Band,
    /// Width and height of the band this level was computed from.
    pub source_dims: (usize, usize),
}

/// Detail planes of one pyramid level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailPlanes {
    pub horizontal: Band,
    pub vertical: Band,
    pub diagonal: Band,
    pub source_dims: (usize, usize),
}

/// `A^N` plus `N` detail triples, finest (level 1) first.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub approx: Band,
    pub details: Vec<DetailPlanes>,
}

impl WaveletPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// The same pyramid with every detail coefficient set to zero.
    pub fn without_details(&self) -> Result<WaveletPyramid> {
        let zero = |b: &Band| Band::filled(b.width(), b.height(), 0.0);
        let details = self
            .details
            .iter()
            .map(|d| {
                Ok(DetailPlanes {
                    horizontal: zero(&d.horizontal)?,
                    vertical: zero(&d.vertical)?,
                    diagonal: zero(&d.diagonal)?,
                    source_dims: d.source_dims,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WaveletPyramid { approx: self.approx.clone(), details })
    }
}

// Plane helpers on raw row-major buffers.

fn pad_even(band: &Band) -> (Vec<f64>, usize, usize) {
    let (w, h) = band.dims();
    let (pw, ph) = (w + w % 2, h + h % 2);
    let mut out = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        let row = band.row(y.min(h - 1));
        out.extend_from_slice(row);
        if pw > w {
            out.push(row[w - 1]);
        }
    }
    (out, pw, ph)
}

fn analyze_rows(src: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let half = w / 2;
    let mut lo = Vec::with_capacity(half * h);
    let mut hi = Vec::with_capacity(half * h);
    for row in src.chunks_exact(w) {
        for pair in row.chunks_exact(2) {
            lo.push(L[0] * pair[0] + L[1] * pair[1]);
            hi.push(H[0] * pair[0] + H[1] * pair[1]);
        }
    }
    (lo, hi)
}

fn analyze_cols(src: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let half = h / 2;
    let mut lo = Vec::with_capacity(w * half);
    let mut hi = Vec::with_capacity(w * half);
    for m in 0..half {
        let (r0, r1) = (&src[2 * m * w..(2 * m + 1) * w], &src[(2 * m + 1) * w..(2 * m + 2) * w]);
        lo.extend(r0.iter().zip(r1).map(|(&a, &b)| L[0] * a + L[1] * b));
        hi.extend(r0.iter().zip(r1).map(|(&a, &b)| H[0] * a + H[1] * b));
    }
    (lo, hi)
}

// Inverse of analyze_cols: planes are w x half, output w x 2*half.
fn synthesize_cols(lo: &[f64], hi: &[f64], w: usize, half: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(w * 2 * half);
    for m in 0..half {
        let (l, h) = (&lo[m * w..(m + 1) * w], &hi[m * w..(m + 1) * w]);
        out.extend(l.iter().zip(h).map(|(&a, &d)| L[0] * a + H[0] * d));
        out.extend(l.iter().zip(h).map(|(&a, &d)| L[1] * a + H[1] * d));
    }
    out
}

// Inverse of analyze_rows: planes are half x h, output 2*half x h.
fn synthesize_rows(lo: &[f64], hi: &[f64], half: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * half * h);
    for y in 0..h {
        for m in 0..half {
            let (a, d) = (lo[y * half + m], hi[y * half + m]);
            out.push(L[0] * a + H[0] * d);
            out.push(L[1] * a + H[1] * d);
        }
    }
    out
}

/// One level of 2-D Haar analysis.
pub fn haar_analyze_level(band: &Band) -> Result<HaarLevel> {
    if band.is_empty() {
        return Err(Error::arg("cannot analyze an empty band"));
    }
    let (padded, pw, ph) = pad_even(band);
    let (row_lo, row_hi) = analyze_rows(&padded, pw, ph);
    let hw = pw / 2;
    let (ll, lh) = analyze_cols(&row_lo, hw, ph);
    let (hl, hh) = analyze_cols(&row_hi, hw, ph);
    let hh_dims = ph / 2;
    Ok(HaarLevel {
        approx: Band::from_vec(hw, hh_dims, ll)?,
        horizontal: Band::from_vec(hw, hh_dims, lh)?,
        vertical: Band::from_vec(hw, hh_dims, hl)?,
        diagonal: Band::from_vec(hw, hh_dims, hh)?,
        source_dims: band.dims(),
    })
}

/// Exact inverse of [`haar_analyze_level`].
pub fn haar_synthesize_level(level: &HaarLevel) -> Result<Band> {
    let dims = level.approx.dims();
    for (name, plane) in [
        ("horizontal", &level.horizontal),
        ("vertical", &level.vertical),
        ("diagonal", &level.diagonal),
    ] {
        if plane.dims() != dims {
            return Err(Error::arg(format!(
                "{name} plane is {}x{}, approximation is {}x{}",
                plane.width(),
                plane.height(),
                dims.0,
                dims.1
            )));
        }
    }
    let (sw, sh) = level.source_dims;
    if sw == 0 || sh == 0 || sw.div_ceil(2) != dims.0 || sh.div_ceil(2) != dims.1 {
        return Err(Error::arg(format!(
            "planes of {}x{} cannot come from a {sw}x{sh} band",
            dims.0, dims.1
        )));
    }
    let (hw, hh) = dims;
    let row_lo = synthesize_cols(level.approx.samples(), level.horizontal.samples(), hw, hh);
    let row_hi = synthesize_cols(level.vertical.samples(), level.diagonal.samples(), hw, hh);
    let padded = synthesize_rows(&row_lo, &row_hi, hw, 2 * hh);
    let pw = 2 * hw;
    let mut out = Vec::with_capacity(sw * sh);
    for y in 0..sh {
        out.extend_from_slice(&padded[y * pw..y * pw + sw]);
    }
    Band::from_vec(sw, sh, out)
}

/// Deepest decomposition for a `width x height` band: levels until both
/// sides reach one pixel (at least one).
pub fn max_levels(width: usize, height: usize) -> usize {
    let mut side = width.max(height);
    let mut n = 0;
    while side > 1 {
        side = side.div_ceil(2);
        n += 1;
    }
    n.max(1)
}

pub fn decompose(band: &Band, levels: usize) -> Result<WaveletPyramid> {
    let max = max_levels(band.width(), band.height());
    if levels == 0 || levels > max {
        return Err(Error::arg(format!(
            "{levels} levels requested for a {}x{} band; feasible range is 1..={max}",
            band.width(),
            band.height()
        )));
    }
    let mut approx = band.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let lvl = haar_analyze_level(&approx)?;
        details.push(DetailPlanes {
            horizontal: lvl.horizontal,
            vertical: lvl.vertical,
            diagonal: lvl.diagonal,
            source_dims: lvl.source_dims,
        });
        approx = lvl.approx;
    }
    Ok(WaveletPyramid { approx, details })
}

pub fn reconstruct(pyr: &WaveletPyramid) -> Result<Band> {
    if pyr.details.is_empty() {
        return Err(Error::arg("pyramid has no levels"));
    }
    let mut approx = pyr.approx.clone();
    for d in pyr.details.iter().rev() {
        approx = haar_synthesize_level(&HaarLevel {
            approx,
            horizontal: d.horizontal.clone(),
            vertical: d.vertical.clone(),
            diagonal: d.diagonal.clone(),
            source_dims: d.source_dims,
        })?;
    }
    Ok(approx)
}

/// Substitutive wavelet fusion.
///
/// For every MS band the PAN is first histogram-matched to that band; the
/// fused band keeps the MS approximation `A^N` and takes all `N` detail
/// triples from the matched PAN.
pub fn fuse_wavelet_substitutive(input: FusionInput<'_>, levels: usize) -> Result<MultiBandImage> {
    let pan = input.pan();
    input.ms().map_bands(|band| {
        let matched = histogram_match(pan, band)?;
        let ms_pyr = decompose(band, levels)?;
        let pan_pyr = decompose(&matched, levels)?;
        reconstruct(&WaveletPyramid { approx: ms_pyr.approx, details: pan_pyr.details })
    })
}
