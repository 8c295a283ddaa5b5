//! Derandomized CMA-ES with pluggable unit-cube samplers.
//!
//! * [`lds`]: uniform, scrambled Halton and Sobol point sets, cached and
//!   endless sampler sources, point-set files.
//! * [`discrepancy`]: L2 star discrepancy (Warnock), Monte-Carlo and exact
//!   L∞ checks, Threshold Accepting subset selection.
//! * [`gauss`]: inverse normal CDF.
//! * [`cmaes`]: the optimizer.
//! * [`bench`]: BBOB-style test functions.
//! * [`analysis`]: attainment curves, AUC, normalization and regression.

pub mod analysis;
pub mod bench;
pub mod cmaes;
pub mod discrepancy;
mod error;
pub mod gauss;
pub mod lds;
pub mod sampler;
pub mod seed;
pub mod trajectory;

pub use error::{Error, Result};
