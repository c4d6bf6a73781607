//! Method selection shared by the command line and the experiment driver.

use core::fmt;
use core::str::FromStr;

use crate::arithmetic::{fuse_brovey, fuse_color_normalized, fuse_multiplicative, FusionInput};
use crate::error::{Error, Result};
use crate::filter::{fuse_hfa_boosted, fuse_hfm, fuse_hpfa, BoostFactor, HpfNormalization, DEFAULT_KERNEL_SIZE};
use crate::raster::MultiBandImage;
use crate::wavelet::fuse_wavelet_substitutive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Brovey,
    ColorNormalized,
    Multiplicative,
    Hpfa,
    Hfa,
    Hfm,
    Wavelet,
}

impl Method {
    /// Every method, in report order.
    pub const ALL: [Method; 7] = [
        Method::Brovey,
        Method::ColorNormalized,
        Method::Multiplicative,
        Method::Hpfa,
        Method::Hfa,
        Method::Hfm,
        Method::Wavelet,
    ];

    /// Command-line spelling.
    pub fn name(self) -> &'static str {
        match self {
            Method::Brovey => "brovey",
            Method::ColorNormalized => "cn",
            Method::Multiplicative => "mlt",
            Method::Hpfa => "hpfa",
            Method::Hfa => "hfa",
            Method::Hfm => "hfm",
            Method::Wavelet => "wavelet",
        }
    }

    /// Short label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Brovey => "BT",
            Method::ColorNormalized => "CN",
            Method::Multiplicative => "MLT",
            Method::Hpfa => "HPFA",
            Method::Hfa => "HFA",
            Method::Hfm => "HFM",
            Method::Wavelet => "WT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s) || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::arg(alloc::format!("unknown fusion method '{s}'")))
    }
}

/// Tunables consumed by the filter and wavelet methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionParams {
    pub kernel_size: usize,
    pub levels: usize,
    pub hpf: HpfNormalization,
    /// Detail gain for HFA; 1.0 is the plain unsharp mask.
    pub boost: BoostFactor,
}

impl Default for FusionParams {
    fn default() -> Self {
        FusionParams { kernel_size: DEFAULT_KERNEL_SIZE, levels: 1, hpf: HpfNormalization::Normalized, boost: BoostFactor::default() }
    }
}

pub fn fuse(method: Method, input: FusionInput<'_>, params: &FusionParams) -> Result<MultiBandImage> {
    match method {
        Method::Brovey => fuse_brovey(input),
        Method::ColorNormalized => fuse_color_normalized(input),
        Method::Multiplicative => fuse_multiplicative(input),
        Method::Hpfa => fuse_hpfa(input, params.kernel_size, params.hpf),
        Method::Hfa => fuse_hfa_boosted(input, params.boost, params.kernel_size),
        Method::Hfm => fuse_hfm(input, params.kernel_size),
        Method::Wavelet => fuse_wavelet_substitutive(input, params.levels),
    }
}
