//! Arithmetic-combination fusion: Brovey, colour-normalized and
//! multiplicative. All three are per-pixel maps of `(M_1..M_K, P)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::raster::{Band, MultiBandImage};

/// A co-registered PAN band and MS stack, already resampled to the same grid.
#[derive(Debug, Clone, Copy)]
pub struct FusionInput<'a> {
    pan: &'a Band,
    ms: &'a MultiBandImage,
}

impl<'a> FusionInput<'a> {
    pub fn new(pan: &'a Band, ms: &'a MultiBandImage) -> Result<Self> {
        if pan.dims() != ms.dims() {
            return Err(Error::arg(format!(
                "PAN is {}x{} but MS is {}x{}; resample MS first",
                pan.width(),
                pan.height(),
                ms.width(),
                ms.height()
            )));
        }
        Ok(FusionInput { pan, ms })
    }

    #[inline]
    pub fn pan(&self) -> &'a Band {
        self.pan
    }

    #[inline]
    pub fn ms(&self) -> &'a MultiBandImage {
        self.ms
    }

    pub(crate) fn band_sums(&self) -> Vec<f64> {
        let mut sums = alloc::vec![0.0; self.pan.len()];
        for band in self.ms.bands() {
            for (s, &m) in sums.iter_mut().zip(band.samples()) {
                *s += m;
            }
        }
        sums
    }
}

/// `F_k = M_k * P / sum_k M_k`; pixels with no MS energy fuse to 0.
pub fn fuse_brovey(input: FusionInput<'_>) -> Result<MultiBandImage> {
    let sums = input.band_sums();
    let pan = input.pan.samples();
    input.ms.map_bands(|band| {
        let out = band
            .samples()
            .iter()
            .zip(pan)
            .zip(&sums)
            .map(|((&m, &p), &s)| if s == 0.0 { 0.0 } else { m * p / s })
            .collect();
        Band::from_vec(band.width(), band.height(), out)
    })
}

/// Colour-normalized (energy subdivision) transform:
/// `F_k = (M_k + 1)(P + 1) K / (sum_k M_k + K) - 1` with `K = 3` for RGB.
///
/// For band counts other than three, both constants become the band count.
pub fn fuse_color_normalized(input: FusionInput<'_>) -> Result<MultiBandImage> {
    let k = input.ms.band_count() as f64;
    let sums = input.band_sums();
    let pan = input.pan.samples();
    input.ms.map_bands(|band| {
        let out = band
            .samples()
            .iter()
            .zip(pan)
            .zip(&sums)
            .map(|((&m, &p), &s)| (m + 1.0) * (p + 1.0) * k / (s + k) - 1.0)
            .collect();
        Band::from_vec(band.width(), band.height(), out)
    })
}

/// `F_k = sqrt(M_k * P)`.
pub fn fuse_multiplicative(input: FusionInput<'_>) -> Result<MultiBandImage> {
    let pan = input.pan.samples();
    if let Some(i) = pan.iter().position(|&p| p < 0.0) {
        return Err(Error::data(format!("negative PAN sample at index {i}")));
    }
    input.ms.map_bands(|band| {
        if let Some(i) = band.samples().iter().position(|&m| m < 0.0) {
            return Err(Error::data(format!("negative MS sample at index {i}")));
        }
        let out = band.samples().iter().zip(pan).map(|(&m, &p)| libm::sqrt(m * p)).collect();
        Band::from_vec(band.width(), band.height(), out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pixel(ms: &[f64], pan: f64) -> (Band, MultiBandImage) {
        let bands = ms.iter().map(|&m| Band::filled(1, 1, m).unwrap()).collect();
        (Band::filled(1, 1, pan).unwrap(), MultiBandImage::new(bands).unwrap())
    }

    fn values(img: &MultiBandImage) -> Vec<f64> {
        img.bands().iter().map(|b| b.samples()[0]).collect()
    }

    fn run(f: fn(FusionInput<'_>) -> Result<MultiBandImage>, ms: &[f64], pan: f64) -> Vec<f64> {
        let (p, m) = pixel(ms, pan);
        values(&f(FusionInput::new(&p, &m).unwrap()).unwrap())
    }

    #[test]
    fn input_rejects_mismatch() {
        let pan = Band::filled(4, 4, 1.0).unwrap();
        let ms = MultiBandImage::from(Band::filled(2, 2, 1.0).unwrap());
        assert!(matches!(FusionInput::new(&pan, &ms), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn brovey_examples() {
        assert_eq!(run(fuse_brovey, &[10.0, 20.0, 30.0], 60.0), [10.0, 20.0, 30.0]);
        // 10*120/60, 20*120/60, 30*120/60
        assert_eq!(run(fuse_brovey, &[10.0, 20.0, 30.0], 120.0), [20.0, 40.0, 60.0]);
        assert_eq!(run(fuse_brovey, &[0.0, 0.0, 0.0], 200.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn color_normalized_examples() {
        assert_eq!(run(fuse_color_normalized, &[0.0, 0.0, 0.0], 0.0), [0.0, 0.0, 0.0]);
        let f = run(fuse_color_normalized, &[50.0, 50.0, 50.0], 50.0);
        assert!(f.iter().all(|v| (v - 50.0).abs() < 1e-12));
        let f = run(fuse_color_normalized, &[10.0, 20.0, 30.0], 100.0);
        let want = [11.0 * 303.0 / 63.0 - 1.0, 21.0 * 303.0 / 63.0 - 1.0, 31.0 * 303.0 / 63.0 - 1.0];
        for (a, b) in f.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((f[0] - 51.905).abs() < 1e-3 && (f[1] - 100.0).abs() < 1e-12 && (f[2] - 148.095).abs() < 1e-3);
    }

    #[test]
    fn color_normalized_generalizes_band_count() {
        // K = 2: (M+1)(P+1)*2/(sum+2) - 1
        let f = run(fuse_color_normalized, &[4.0, 6.0], 9.0);
        assert!((f[0] - (5.0 * 10.0 * 2.0 / 12.0 - 1.0)).abs() < 1e-12);
        assert!((f[1] - (7.0 * 10.0 * 2.0 / 12.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn multiplicative_examples() {
        assert_eq!(run(fuse_multiplicative, &[4.0], 9.0), [6.0]);
        assert_eq!(run(fuse_multiplicative, &[0.0], 77.0), [0.0]);
        assert_eq!(run(fuse_multiplicative, &[50.0], 200.0), [100.0]);
        let (p, m) = pixel(&[-1.0], 4.0);
        assert!(matches!(fuse_multiplicative(FusionInput::new(&p, &m).unwrap()), Err(Error::InvalidData(_))));
        let (p, m) = pixel(&[1.0], -4.0);
        assert!(matches!(fuse_multiplicative(FusionInput::new(&p, &m).unwrap()), Err(Error::InvalidData(_))));
    }

    #[test]
    fn fusion_keeps_band_count() {
        let pan = Band::filled(3, 2, 10.0).unwrap();
        let ms = MultiBandImage::new(vec![Band::filled(3, 2, 1.0).unwrap(); 4]).unwrap();
        let input = FusionInput::new(&pan, &ms).unwrap();
        for f in [fuse_brovey, fuse_color_normalized, fuse_multiplicative] {
            let out = f(input).unwrap();
            assert_eq!(out.band_count(), 4);
            assert_eq!(out.dims(), (3, 2));
        }
    }
}
