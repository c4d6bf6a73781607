//! Brute-force reference implementations used to cross-check the kernels.
//! Written straight from the defining formulas and kept independent of the
//! library's code paths.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::FRAC_1_SQRT_2;

/// Plain row-major grid used by the oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
    pub v: Vec<f64>,
}

impl Grid {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.v[y * self.w + x]
    }
}

/// Materializes the replicate-padded array, then a quadruple loop.
pub fn convolve(g: &Grid, n: usize, weights: &[f64], norm: f64) -> Vec<f64> {
    let c = n / 2;
    let (pw, ph) = (g.w + 2 * c, g.h + 2 * c);
    let mut padded = vec![0.0; pw * ph];
    for y in 0..ph {
        for x in 0..pw {
            let sx = (x as isize - c as isize).clamp(0, g.w as isize - 1) as usize;
            let sy = (y as isize - c as isize).clamp(0, g.h as isize - 1) as usize;
            padded[y * pw + x] = g.at(sx, sy);
        }
    }
    let mut out = Vec::with_capacity(g.w * g.h);
    for i in 0..g.h {
        for j in 0..g.w {
            let mut acc = 0.0;
            for u in 0..n {
                for v in 0..n {
                    acc += weights[u * n + v] * padded[(i + u) * pw + j + v];
                }
            }
            out.push(norm * acc);
        }
    }
    out
}

/// One-level orthonormal Haar analysis matrix for even `n`: the first
/// `n/2` rows are lowpass pairs, the rest highpass pairs.
pub fn haar_matrix(n: usize) -> Vec<Vec<f64>> {
    assert!(n.is_multiple_of(2));
    let mut m = vec![vec![0.0; n]; n];
    for k in 0..n / 2 {
        m[k][2 * k] = FRAC_1_SQRT_2;
        m[k][2 * k + 1] = FRAC_1_SQRT_2;
        m[n / 2 + k][2 * k] = FRAC_1_SQRT_2;
        m[n / 2 + k][2 * k + 1] = -FRAC_1_SQRT_2;
    }
    m
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; c]; r];
    for i in 0..r {
        for j in 0..c {
            out[i][j] = (0..k).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

fn to_rows(g: &Grid) -> Vec<Vec<f64>> {
    g.v.chunks(g.w).map(|r| r.to_vec()).collect()
}

/// Single-level 2-D Haar on an even-sized grid as `A_h X A_w^T`.
/// Returns (approx, horizontal, vertical, diagonal) planes.
pub struct HaarPlanes {
    pub approx: Vec<f64>,
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
    pub diagonal: Vec<f64>,
}

pub fn haar_level(g: &Grid) -> HaarPlanes {
    let y = matmul(&matmul(&haar_matrix(g.h), &to_rows(g)), &transpose(&haar_matrix(g.w)));
    let (hw, hh) = (g.w / 2, g.h / 2);
    let quad = |r0: usize, c0: usize| {
        let mut out = Vec::new();
        for r in 0..hh {
            for c in 0..hw {
                out.push(y[r0 + r][c0 + c]);
            }
        }
        out
    };
    HaarPlanes {
        approx: quad(0, 0),
        horizontal: quad(hh, 0),
        vertical: quad(0, hw),
        diagonal: quad(hh, hw),
    }
}

/// `levels`-deep low-pass projection of a power-of-two square grid:
/// analyse, zero every detail coefficient, synthesize with the transposes.
pub fn haar_smooth(g: &Grid, levels: usize) -> Vec<f64> {
    let n = g.w;
    assert_eq!(g.w, g.h);
    let mut coeffs = to_rows(g);
    let mut size = n;
    let mut ops = Vec::new();
    for _ in 0..levels {
        let a = haar_matrix(size);
        let block: Vec<Vec<f64>> = coeffs[..size].iter().map(|r| r[..size].to_vec()).collect();
        let t = matmul(&matmul(&a, &block), &transpose(&a));
        for r in 0..size {
            for c in 0..size {
                coeffs[r][c] = if r < size / 2 && c < size / 2 { t[r][c] } else { 0.0 };
            }
        }
        ops.push(a);
        size /= 2;
    }
    for a in ops.iter().rev() {
        size *= 2;
        let block: Vec<Vec<f64>> = coeffs[..size].iter().map(|r| r[..size].to_vec()).collect();
        let x = matmul(&matmul(&transpose(a), &block), a);
        for r in 0..size {
            coeffs[r][..size].copy_from_slice(&x[r][..size]);
        }
    }
    coeffs.concat()
}

// Metrics, each a direct transcription with explicit index loops.

pub fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        s += v[i];
    }
    s / v.len() as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    let mu = mean(v);
    let mut s = 0.0;
    for i in 0..v.len() {
        s += (v[i] - mu).powi(2);
    }
    (s / v.len() as f64).sqrt()
}

pub fn entropy(v: &[f64]) -> f64 {
    let mut en = 0.0;
    for level in 0..256 {
        let count = v.iter().filter(|&&s| s == level as f64).count();
        if count > 0 {
            let p = count as f64 / v.len() as f64;
            en -= p * p.log2();
        }
    }
    en
}

pub fn correlation(f: &[f64], m: &[f64]) -> f64 {
    let (mf, mm) = (mean(f), mean(m));
    let (mut num, mut df2, mut dm2) = (0.0, 0.0, 0.0);
    for i in 0..f.len() {
        num += (f[i] - mf) * (m[i] - mm);
        df2 += (f[i] - mf).powi(2);
        dm2 += (m[i] - mm).powi(2);
    }
    num / (df2.sqrt() * dm2.sqrt())
}

pub fn snr(f: &[f64], m: &[f64]) -> f64 {
    let (mut sig, mut noise) = (0.0, 0.0);
    for i in 0..f.len() {
        sig += f[i].powi(2);
        noise += (f[i] - m[i]).powi(2);
    }
    (sig / noise).sqrt()
}

pub fn nrmse(f: &[f64], m: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..f.len() {
        s += (f[i] - m[i]).powi(2);
    }
    (s / (f.len() as f64 * 255.0 * 255.0)).sqrt()
}

pub fn deviation_index(f: &[f64], m: &[f64]) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for i in 0..f.len() {
        if m[i] > 0.0 {
            s += (f[i] - m[i]).abs() / m[i];
            n += 1;
        }
    }
    s / n as f64
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
