//! Command-line driver for `rarebasis-core`: TOML experiment configs, report
//! rendering, a parallel grid oracle and mask export.

pub mod commands;
pub mod config;
pub mod maskfile;
pub mod parallel;
pub mod report;

use num_rational::BigRational;
use num_traits::ToPrimitive;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] rarebasis_core::Error),
}

impl CliError {
    /// Process exit code: 2 for every error (1 is reserved for a failed check).
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub(crate) fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
