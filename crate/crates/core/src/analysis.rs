//! Attainment curves, their area, and the discrepancy/performance fit.
//!
//! The EAF value at a budget `t` is the mean over runs of the fraction of
//! log-uniform precision targets in `[1e-8, 1e2]` reached within `t`
//! evaluations. A target counts as reached when best precision ≤ target.
//! Areas are taken over a `log10` budget axis and normalized to `[0, 1]`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::sampler::SamplerSpec;
use crate::trajectory::{checkpoint_schedule, Trajectory};

pub const DEFAULT_TARGETS: usize = 51;
pub const TARGET_LOW: f64 = 1e-8;
pub const TARGET_HIGH: f64 = 1e2;

/// One optimizer run with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub fid: u32,
    pub iid: u32,
    pub dim: usize,
    pub sampler: SamplerSpec,
    pub lambda: usize,
    pub seed: u64,
    pub budget: u64,
    pub evaluations: u64,
    pub trajectory: Trajectory,
}

/// Attainment fraction against evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct EafCurve {
    pub budget_grid: Vec<u64>,
    pub values: Vec<f64>,
}

impl EafCurve {
    /// Value at `t`, holding the last grid value to the right.
    pub fn value_at(&self, t: u64) -> f64 {
        match self.budget_grid.partition_point(|&g| g <= t) {
            0 => 0.0,
            i => self.values[i - 1],
        }
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// `n` log-uniform targets from `1e-8` to `1e2`.
pub fn targets(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![TARGET_HIGH],
        _ => (0..n)
            .map(|j| {
                if j == 0 {
                    TARGET_LOW
                } else if j == n - 1 {
                    TARGET_HIGH
                } else {
                    10f64.powf(-8.0 + 10.0 * j as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

fn attained_fraction(best: f64, targets: &[f64]) -> f64 {
    // targets ascend, so attained ones form a suffix
    let missed = targets.partition_point(|&t| best > t);
    (targets.len() - missed) as f64 / targets.len() as f64
}

/// Aggregated attainment curve over `runs` on the shared checkpoint grid.
pub fn eaf_curve(runs: &[RunRecord], n_targets: usize) -> Result<EafCurve> {
    let first = runs
        .first()
        .ok_or_else(|| Error::InvalidArgument("no runs to aggregate".into()))?;
    if runs.iter().any(|r| r.dim != first.dim) {
        return Err(Error::InvalidArgument("runs mix dimensions".into()));
    }
    if n_targets == 0 {
        return Err(Error::InvalidArgument("need at least one target".into()));
    }
    let budget = runs.iter().map(|r| r.budget).min().unwrap_or(0);
    let mut grid: BTreeSet<u64> = checkpoint_schedule(budget).into_iter().collect();
    for r in runs {
        grid.extend(r.trajectory.points().iter().map(|p| p.0).filter(|&t| t <= budget));
    }
    let budget_grid: Vec<u64> = grid.into_iter().collect();
    let targets = targets(n_targets);
    let values = budget_grid
        .iter()
        .map(|&t| {
            runs.iter()
                .map(|r| attained_fraction(r.trajectory.best_at(t), &targets))
                .sum::<f64>()
                / runs.len() as f64
        })
        .collect();
    Ok(EafCurve {
        budget_grid,
        values,
    })
}

/// Normalized area under `curve` over `log10(t)` for `t ∈ [1, budget]`.
pub fn eaf_auc(curve: &EafCurve, budget: u64) -> f64 {
    if budget <= 1 {
        return curve.value_at(1);
    }
    let mut xs = vec![0.0];
    let mut ys = vec![curve.value_at(1)];
    for (&t, &v) in curve.budget_grid.iter().zip(&curve.values) {
        if t > 1 && t <= budget {
            xs.push((t as f64).log10());
            ys.push(v);
        }
    }
    let end = (budget as f64).log10();
    if *xs.last().unwrap() < end {
        xs.push(end);
        ys.push(curve.value_at(budget));
    }
    let area: f64 = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (y[0] + y[1]) * (x[1] - x[0]))
        .sum();
    area / end
}

/// Key of an aggregated cell: sampler (kind and cache size) and dimension.
pub type CellKey = (SamplerSpec, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: BTreeMap<CellKey, f64>,
    /// Dimensions whose values were all equal (mapped to 0.5).
    pub degenerate_dims: Vec<usize>,
}

/// Min-max normalization within each dimension.
pub fn normalize_per_dim(table: &BTreeMap<CellKey, f64>) -> Normalized {
    let mut ranges: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for (&(_, dim), &v) in table {
        let e = ranges.entry(dim).or_insert((v, v));
        e.0 = e.0.min(v);
        e.1 = e.1.max(v);
    }
    let degenerate_dims: Vec<usize> = ranges
        .iter()
        .filter(|(_, (lo, hi))| hi <= lo)
        .map(|(&d, _)| d)
        .collect();
    let values = table
        .iter()
        .map(|(key, &v)| {
            let (lo, hi) = ranges[&key.1];
            let norm = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            (*key, norm)
        })
        .collect();
    Normalized {
        values,
        degenerate_dims,
    }
}

/// Least-squares line and Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub n: usize,
    /// Set when either variable has zero variance.
    pub degenerate: bool,
}

/// Ordinary least squares of AUC on `log10` discrepancy.
pub fn discrepancy_performance_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonFinite("fit input".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let degenerate = sxx == 0.0 || syy == 0.0;
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let pearson_r = if degenerate { 0.0 } else { sxy / (sxx * syy).sqrt() };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        pearson_r,
        n: points.len(),
        degenerate,
    })
}
