//! Star discrepancies of unit-cube point sets.
//!
//! The L2 star discrepancy is evaluated with Warnock's closed form. A
//! Monte-Carlo estimator of the same integral and an exact enumeration of the
//! L∞ star discrepancy serve as independent checks.

mod ta;

use std::fmt;

use rand::RngCore;

pub use ta::{ta_search, ta_subset, TaOptions, TaOutcome};

use crate::error::{Error, Result};
use crate::lds::PointSet;
use crate::seed;

/// Upper bound on box evaluations accepted by [`linf_star_exact`].
pub const LINF_ENUMERATION_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyMethod {
    Warnock,
    MonteCarlo,
    LinfExact,
}

impl fmt::Display for DiscrepancyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscrepancyMethod::Warnock => "WARNOCK",
            DiscrepancyMethod::MonteCarlo => "MONTECARLO",
            DiscrepancyMethod::LinfExact => "LINF_EXACT",
        })
    }
}

/// One row of a discrepancy table.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub set_id: String,
    pub dim: usize,
    pub n: usize,
    pub method: DiscrepancyMethod,
    /// Discrepancy value; the L∞ value for `LinfExact` rows.
    pub value: f64,
    /// Present exactly for Monte-Carlo rows.
    pub mc_std_error: Option<f64>,
}

impl DiscrepancyReport {
    pub const CSV_HEADER: &'static str = "set_id,dim,n,method,l2_star,mc_std_error";

    pub fn warnock(set_id: impl Into<String>, ps: &PointSet) -> Self {
        Self {
            set_id: set_id.into(),
            dim: ps.dim(),
            n: ps.len(),
            method: DiscrepancyMethod::Warnock,
            value: l2_star(ps),
            mc_std_error: None,
        }
    }

    pub fn monte_carlo(set_id: impl Into<String>, ps: &PointSet, samples: usize, seed: u64) -> Result<Self> {
        let (value, se) = l2_star_mc(ps, samples, seed)?;
        Ok(Self {
            set_id: set_id.into(),
            dim: ps.dim(),
            n: ps.len(),
            method: DiscrepancyMethod::MonteCarlo,
            value,
            mc_std_error: Some(se),
        })
    }

    pub fn linf(set_id: impl Into<String>, ps: &PointSet) -> Result<Self> {
        Ok(Self {
            set_id: set_id.into(),
            dim: ps.dim(),
            n: ps.len(),
            method: DiscrepancyMethod::LinfExact,
            value: linf_star_exact(ps)?,
            mc_std_error: None,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:?},{}",
            self.set_id,
            self.dim,
            self.n,
            self.method,
            self.value,
            self.mc_std_error.map(|s| format!("{s:?}")).unwrap_or_default()
        )
    }
}

/// Per-point factor `Π_k (1 − x_k²) / 2`.
pub(crate) fn single_term(p: &[f64]) -> f64 {
    p.iter().map(|&x| 0.5 * (1.0 - x * x)).product()
}

/// Pair factor `Π_k (1 − max(x_k, y_k))`.
#[inline]
pub(crate) fn pair_term(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| 1.0 - a.max(b)).product()
}

/// Squared L2 star discrepancy via Warnock's formula, clamped at 0.
pub(crate) fn l2_star_squared(ps: &PointSet) -> f64 {
    let n = ps.len() as f64;
    let d = ps.dim() as i32;
    let single: f64 = ps.points().map(single_term).sum();
    let mut pairs = 0.0;
    for i in 0..ps.len() {
        let p = ps.point(i);
        let mut row = 0.0;
        for j in 0..i {
            row += pair_term(p, ps.point(j));
        }
        pairs += 2.0 * row + pair_term(p, p);
    }
    let value = 3f64.powi(-d) - 2.0 / n * single + pairs / (n * n);
    value.max(0.0)
}

/// L2 star discrepancy of `ps`.
pub fn l2_star(ps: &PointSet) -> f64 {
    l2_star_squared(ps).sqrt()
}

/// Monte-Carlo estimate of the L2 star discrepancy and its standard error.
///
/// Box corners are drawn uniformly; the estimate is the square root of the
/// mean squared local discrepancy, with a delta-method standard error.
pub fn l2_star_mc(ps: &PointSet, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo check needs at least 100 samples, got {samples}"
        )));
    }
    let dim = ps.dim();
    let n = ps.len() as f64;
    let mut rng = seed::rng(seed);
    let mut q = vec![0.0; dim];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        for v in q.iter_mut() {
            *v = seed::unit_f64(rng.next_u64());
        }
        let inside = ps
            .points()
            .filter(|p| p.iter().zip(&q).all(|(x, b)| x < b))
            .count() as f64;
        let volume: f64 = q.iter().product();
        let local = inside / n - volume;
        let g = local * local;
        sum += g;
        sum_sq += g * g;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    let se_mean = (var / m).sqrt();
    let estimate = mean.sqrt();
    let se = if estimate > 0.0 { se_mean / (2.0 * estimate) } else { 0.0 };
    Ok((estimate, se))
}

/// Exact L∞ star discrepancy by enumerating the critical grid.
///
/// Each axis contributes the distinct point coordinates plus 1. At every
/// grid corner both the open-box deficit `λ(q) − |P ∩ [0,q)|/N` and the
/// closed-box excess `|P ∩ [0,q]|/N − λ(q)` are evaluated.
pub fn linf_star_exact(ps: &PointSet) -> Result<f64> {
    let dim = ps.dim();
    let n = ps.len();
    let cost = ((n + 1) as f64).powi(dim as i32) * n as f64;
    if cost > LINF_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            cost,
            limit: LINF_ENUMERATION_LIMIT,
        });
    }
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut values: Vec<f64> = ps.points().map(|p| p[k]).collect();
            values.push(1.0);
            values.sort_by(f64::total_cmp);
            values.dedup();
            values
        })
        .collect();

    let nf = n as f64;
    let mut best: f64 = 0.0;
    let mut cursor = vec![0usize; dim];
    let mut corner = vec![0.0; dim];
    loop {
        for k in 0..dim {
            corner[k] = axes[k][cursor[k]];
        }
        let volume: f64 = corner.iter().product();
        let (mut open, mut closed) = (0usize, 0usize);
        for p in ps.points() {
            if p.iter().zip(&corner).all(|(x, q)| x <= q) {
                closed += 1;
                if p.iter().zip(&corner).all(|(x, q)| x < q) {
                    open += 1;
                }
            }
        }
        best = best
            .max(volume - open as f64 / nf)
            .max(closed as f64 / nf - volume);

        // odometer increment over the grid
        let mut k = 0;
        loop {
            if k == dim {
                return Ok(best);
            }
            cursor[k] += 1;
            if cursor[k] < axes[k].len() {
                break;
            }
            cursor[k] = 0;
            k += 1;
        }
    }
}
