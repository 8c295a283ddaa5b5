//! Full grid sweeps.
//!
//! Layout of an output directory:
//!
//! ```text
//! spec.txt           canonical copy of the spec
//! pointsets/         fixed cache sets, one file per (kind, k, dim)
//! records/           one .rec file per run, named by a hash of its cell
//! discrepancy.csv    Warnock table of every cached sampler
//! eaf_curve.csv, auc.csv, fit.csv, plotdata.json
//! ```
//!
//! A record whose file already exists with a matching cell description is
//! not run again, so an interrupted sweep resumes where it stopped.

use std::fs;
use std::path::Path;

use qmc_cmaes::analysis::DEFAULT_TARGETS;
use qmc_cmaes::lds::write_point_set;
use rayon::prelude::*;

use crate::analyze::{write_analysis, Analysis};
use crate::cells::{Cell, SetContext, SetTable};
use crate::error::{CliError, Result};
use crate::points::{discrepancy_table, render_table};
use crate::record::{self, write_atomic};
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub ran: usize,
    pub skipped: usize,
    pub analysis: Analysis,
}

pub fn context(spec: &ExperimentSpec) -> SetContext {
    SetContext {
        master_seed: spec.master_seed,
        ta_iters: spec.ta_iters,
        import_dir: spec.import_dir.clone(),
    }
}

/// Every cell of the grid in a fixed order.
pub fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let mut out = Vec::with_capacity(spec.cell_count());
    for &dim in &spec.dims {
        for &sampler in &spec.samplers {
            for &fid in &spec.fids {
                for iid in spec.iids() {
                    out.push(Cell {
                        fid,
                        iid,
                        dim,
                        sampler,
                        lambda: spec.lambda,
                        budget: spec.budget(dim),
                    });
                }
            }
        }
    }
    out
}

/// Runs `f` over `items` on `jobs` threads, keeping input order.
pub fn parallel_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    if jobs <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| items.par_iter().map(f).collect())
}

pub fn run_experiment(spec: &ExperimentSpec, out: &Path, jobs: usize, quiet: bool) -> Result<ExperimentSummary> {
    let ctx = context(spec);
    let records_dir = out.join("records");
    let sets_dir = out.join("pointsets");
    for d in [out, records_dir.as_path(), sets_dir.as_path()] {
        fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
    }
    write_atomic(&out.join("spec.txt"), &spec.to_text())?;

    let sets = SetTable::build(&spec.samplers, &spec.dims, &ctx)?;
    for ((kind, k, dim), set) in sets.iter() {
        write_atomic(&sets_dir.join(format!("{kind}-{k}-d{dim}.txt")), &write_point_set(set))?;
    }

    let cells = cells(spec);
    let total = cells.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let results = parallel_map(&cells, jobs, |cell| {
        let key = cell.key(&ctx, &sets);
        let path = records_dir.join(cell.file_name(&ctx, &sets));
        let existing = if path.is_file() {
            record::load(&path).ok().filter(|rf| rf.cell == key)
        } else {
            None
        };
        let fresh = existing.is_none();
        let rf = match existing {
            Some(rf) => rf,
            None => {
                let rf = cell.execute(&ctx, &sets, false)?;
                write_atomic(&path, &record::render(&rf))?;
                rf
            }
        };
        let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        if !quiet && n.is_multiple_of((total / 10).max(1)) {
            eprintln!("{n}/{total} runs");
        }
        Ok((fresh, rf.record))
    })?;
    let ran = results.iter().filter(|r| r.0).count();
    let records: Vec<_> = results.into_iter().map(|r| r.1).collect();

    let table = discrepancy_table(&spec.samplers, &spec.dims, &ctx, &sets)?;
    write_atomic(&out.join("discrepancy.csv"), &render_table(&table))?;
    let discrepancy: Vec<_> = table.iter().map(|r| (r.set_id.clone(), r.dim, r.value)).collect();
    let analysis = write_analysis(&records, &discrepancy, out, DEFAULT_TARGETS)?;
    Ok(ExperimentSummary {
        ran,
        skipped: total - ran,
        analysis,
    })
}
