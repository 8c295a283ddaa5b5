//! Cache size against population size.
//!
//! For every dimension, cache size and population size, the study runs one
//! cached sampler over all functions and instances, plus an endless uniform
//! baseline at each population size. When the cache holds exactly one
//! population, every generation sees the same points.

use std::fmt::Write as _;

use qmc_cmaes::bench::FUNCTION_IDS;
use qmc_cmaes::lds::Generator;
use qmc_cmaes::sampler::SamplerSpec;
use qmc_cmaes::seed::fnv1a_f64;

use crate::analyze::summarize;
use crate::cells::{batch_period, Cell, SetContext, SetTable};
use crate::error::{CliError, Result};
use crate::experiment::parallel_map;
use crate::spec::{DEFAULT_BUDGET_MULTIPLIER, DEFAULT_TA_ITERS};

pub const ZERO_VARIANCE_FLAG: &str = "zero-intergeneration-variance";

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaStudy {
    pub kind: Generator,
    pub dims: Vec<usize>,
    pub ks: Vec<usize>,
    pub lambdas: Vec<usize>,
    pub fids: Vec<u32>,
    pub instances: u32,
    pub budget_multiplier: u64,
    pub master_seed: u64,
    pub ta_iters: usize,
    pub n_targets: usize,
}

impl Default for LambdaStudy {
    fn default() -> Self {
        Self {
            kind: Generator::Optimized,
            dims: vec![2, 5],
            ks: vec![16, 32, 64, 128],
            lambdas: vec![15, 16],
            fids: FUNCTION_IDS.to_vec(),
            instances: 10,
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            master_seed: 0,
            ta_iters: DEFAULT_TA_ITERS,
            n_targets: qmc_cmaes::analysis::DEFAULT_TARGETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRow {
    pub dim: usize,
    pub sampler: SamplerSpec,
    pub lambda: usize,
    pub final_eaf: f64,
    pub auc: f64,
    /// Generations after which the raw batches repeat; `None` for streams.
    pub cycle_generations: Option<usize>,
}

impl LambdaRow {
    pub fn flag(&self) -> &'static str {
        if self.cycle_generations == Some(1) {
            ZERO_VARIANCE_FLAG
        } else {
            ""
        }
    }
}

/// Period of the raw batches a cell's sampler feeds the optimizer.
fn cycle_of(cell: &Cell, lambda: usize, ctx: &SetContext, sets: &SetTable) -> Result<Option<usize>> {
    let Some(k) = cell.sampler.cache else { return Ok(None) };
    let mut src = cell.source(ctx, sets)?;
    // the period divides k, so 2k batches always show two full periods
    let hashes: Vec<u64> = (0..2 * k).map(|_| fnv1a_f64(&src.draw(lambda))).collect();
    Ok(batch_period(&hashes))
}

pub fn run_lambda_study(study: &LambdaStudy, jobs: usize) -> Result<Vec<LambdaRow>> {
    if !matches!(study.kind, Generator::Optimized | Generator::Sobol) {
        return Err(CliError::Usage(format!("the study compares OPTIMIZED or SOBOL sets, not {}", study.kind)));
    }
    if study.fids.is_empty() || study.instances == 0 || study.dims.is_empty() {
        return Err(CliError::Usage("the study needs at least one function, instance and dimension".into()));
    }
    if study.lambdas.iter().any(|&l| l < 2) {
        return Err(CliError::Usage("population sizes must be at least 2".into()));
    }
    let ctx = SetContext {
        master_seed: study.master_seed,
        ta_iters: study.ta_iters,
        import_dir: None,
    };
    let mut samplers: Vec<SamplerSpec> = study.ks.iter().map(|&k| SamplerSpec::cached(study.kind, k)).collect();
    samplers.push(SamplerSpec::endless(Generator::Uniform));
    let sets = SetTable::build(&samplers, &study.dims, &ctx)?;

    let mut groups = Vec::new();
    for &dim in &study.dims {
        for &sampler in &samplers {
            for &lambda in &study.lambdas {
                groups.push((dim, sampler, lambda));
            }
        }
    }
    let mut cells = Vec::new();
    for &(dim, sampler, lambda) in &groups {
        for &fid in &study.fids {
            for iid in 1..=study.instances {
                cells.push(Cell {
                    fid,
                    iid,
                    dim,
                    sampler,
                    lambda: Some(lambda),
                    budget: study.budget_multiplier * dim as u64,
                });
            }
        }
    }
    let records = parallel_map(&cells, jobs, |c| Ok(c.execute(&ctx, &sets, false)?.record))?;
    let per_group = study.fids.len() * study.instances as usize;
    groups
        .iter()
        .zip(records.chunks(per_group))
        .map(|(&(dim, sampler, lambda), runs)| {
            let (curve, auc, _) = summarize(runs, study.n_targets)?;
            let probe = Cell {
                dim,
                sampler,
                lambda: Some(lambda),
                ..cells[0]
            };
            Ok(LambdaRow {
                dim,
                sampler,
                lambda,
                final_eaf: curve.final_value(),
                auc,
                cycle_generations: cycle_of(&probe, lambda, &ctx, &sets)?,
            })
        })
        .collect()
}

pub fn render(rows: &[LambdaRow]) -> String {
    let mut out = String::from("dim,sampler,k,lambda,final_eaf,auc,cycle_generations,flag\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.dim,
            r.sampler.kind,
            r.sampler.cache_label(),
            r.lambda,
            r.final_eaf,
            r.auc,
            r.cycle_generations.map_or("none".to_string(), |c| c.to_string()),
            r.flag()
        )
        .unwrap();
    }
    out
}
