//! Pixel-level pan-sharpening.
//!
//! Fuses a high-resolution panchromatic band with a co-registered,
//! already-resampled multispectral stack, and scores fused results against
//! a reference. Seven fusion methods are provided:
//!
//! * arithmetic combinations: Brovey, colour-normalized, multiplicative
//!   ([`arithmetic`]);
//! * spatial-domain detail injection: high-pass additive, high-frequency
//!   addition and high-frequency modulation ([`filter`]);
//! * substitutive Haar wavelet fusion ([`wavelet`]).
//!
//! Quality indices live in [`metrics`]. All sample data is `f64`; the only
//! rounding happens in [`raster::quantize`].
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod arithmetic;
pub mod error;
pub mod filter;
pub mod method;
pub mod metrics;
pub mod raster;
pub mod wavelet;

pub use arithmetic::FusionInput;
pub use error::{Error, Result};
pub use method::{fuse, FusionParams, Method};
pub use raster::{Band, MultiBandImage, QuantizationPolicy};
