use alloc::string::String;
use core::fmt;

/// Errors produced by the raster, fusion and metric kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument is out of range or shapes disagree.
    InvalidArgument(String),
    /// Sample data violates a precondition (NaN, negative, unquantized, ...).
    InvalidData(String),
    /// A statistic is undefined for the input (zero variance, empty support).
    Degenerate(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::InvalidData(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::InvalidData(m) => write!(f, "invalid data: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate statistics: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
