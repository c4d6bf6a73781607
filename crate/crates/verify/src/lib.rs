//! Holds the `acceptance` test target; see `tests/acceptance.rs`.
//!
//! Kept as its own package so that a failing criterion does not stop
//! `cargo test --workspace` before the other suites have run.
