use super::{CmaParams, CmaState};
use crate::bench::Problem;
use crate::error::{Error, Result};
use crate::lds::SamplerSource;
use crate::seed::fnv1a_f64;
use crate::trajectory::{Trajectory, TrajectoryRecorder};

/// Precision at which a run counts as solved.
pub const DEFAULT_TARGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Maximum number of objective evaluations.
    pub budget: u64,
    /// Stop once best precision is at or below this value.
    pub target: f64,
    /// Keep a hash of every generation's raw points.
    pub record_batches: bool,
}

impl RunConfig {
    pub fn new(budget: u64) -> Self {
        Self {
            budget,
            target: DEFAULT_TARGET,
            record_batches: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub evaluations: u64,
    /// Completed ask/tell cycles.
    pub generations: u64,
    pub best_precision: f64,
    pub best_x: Vec<f64>,
    /// FNV-1a hash of each generation's raw batch, when requested.
    pub batch_hashes: Vec<u64>,
    /// Set when the strategy broke down numerically before the budget was
    /// spent; the run then ends with its trajectory so far.
    pub breakdown: Option<String>,
    pub final_state: CmaState,
}

/// Runs the optimizer on a benchmark problem.
pub fn run(
    problem: &mut Problem,
    params: &CmaParams,
    state: CmaState,
    source: &mut SamplerSource,
    config: &RunConfig,
) -> Result<RunOutcome> {
    run_objective(|x| Ok(problem.evaluate(x)?.precision), params, state, source, config)
}

/// Ask/evaluate/tell until the budget is spent or the target is reached.
///
/// `objective` returns the precision of a point. Evaluation stops mid
/// generation when the budget runs out; no restarts, no bound handling.
/// A numerical failure of the update (for example a step size overflowing
/// on a degenerate sample cache) ends the run early and is reported in
/// [`RunOutcome::breakdown`]; objective errors propagate.
pub fn run_objective<F>(
    mut objective: F,
    params: &CmaParams,
    mut state: CmaState,
    source: &mut SamplerSource,
    config: &RunConfig,
) -> Result<RunOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if config.budget < params.lambda as u64 {
        return Err(Error::InvalidArgument(format!(
            "budget {} is smaller than the population size {}",
            config.budget, params.lambda
        )));
    }
    if source.dim() != params.dim {
        return Err(Error::InvalidArgument(format!(
            "sampler dimension {} does not match problem dimension {}",
            source.dim(),
            params.dim
        )));
    }
    let mut recorder = TrajectoryRecorder::new();
    let mut evaluations = 0u64;
    let mut best_x = state.mean.as_slice().to_vec();
    let mut batch_hashes = Vec::new();
    let mut breakdown = None;

    'generations: loop {
        let mut candidates = state.ask(params, source);
        if config.record_batches {
            let raw: Vec<f64> = candidates.iter().flat_map(|c| c.raw.iter().copied()).collect();
            batch_hashes.push(fnv1a_f64(&raw));
        }
        for c in candidates.iter_mut() {
            let precision = objective(&c.x)?;
            evaluations += 1;
            if precision < recorder.best() {
                best_x.clone_from(&c.x);
            }
            recorder.record(evaluations, precision);
            c.fitness = precision;
            if recorder.best() <= config.target || evaluations >= config.budget {
                break 'generations;
            }
        }
        match state.tell(params, &candidates) {
            Ok(()) => {}
            Err(e) if e.is_numerical() => {
                breakdown = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(RunOutcome {
        best_precision: recorder.best(),
        trajectory: recorder.finish(),
        evaluations,
        generations: state.generation,
        best_x,
        batch_hashes,
        breakdown,
        final_state: state,
    })
}
