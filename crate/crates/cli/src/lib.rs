//! Command implementations behind the `qmc-cmaes` binary.

pub mod analyze;
pub mod cells;
pub mod error;
pub mod experiment;
pub mod lambda_study;
pub mod points;
pub mod record;
pub mod spec;

pub use error::{CliError, Result};
