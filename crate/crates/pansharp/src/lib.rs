//! File formats, reports, the reference-based experiment and the command
//! line around [`pansharp_core`].

pub mod cli;
pub mod experiment;
pub mod pnm;
pub mod report;

pub use pansharp_core as core;
