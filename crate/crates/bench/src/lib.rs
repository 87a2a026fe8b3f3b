//! Harness that sweeps the expansion constructors over the kernel gallery
//! and writes spectra, rate curves, method comparisons and timings as CSV.
//!
//! Every command returns its table as a string; writing to disk is left to
//! the caller so the same code backs the CLI and the tests.

mod commands;
mod config;
mod error;
mod slope;

pub use commands::{
    build, compare, compare_csv, rate, spectrum, timing, timing_csv, write_output, Built,
    CompareRow, RateReport, RateRow, TimingRow,
};
pub use config::{Config, MList};
pub use error::{BenchError, Result};
pub use slope::fit_slope;

/// Decimal with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}
