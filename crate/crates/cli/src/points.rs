//! Point-set generation, subset optimization and discrepancy tables.

use qmc_cmaes::discrepancy::{l2_star, ta_search, DiscrepancyReport, TaOptions, TaOutcome};
use qmc_cmaes::lds::{halton_set, sobol_set, uniform_set, Generator, PointSet};
use qmc_cmaes::sampler::SamplerSpec;
use qmc_cmaes::seed::{mix, tag};

use crate::cells::{ta_base_size, SetContext, SetTable};
use crate::error::{CliError, Result};

/// Number of uniform draws averaged in discrepancy tables.
pub const UNIFORM_DRAWS: usize = 100;

/// `n` points of the given kind. SOBOL rounds up to a power of two;
/// OPTIMIZED selects `n` points from a Sobol base of `max(512, 8n)`.
pub fn generate(kind: Generator, n: usize, dim: usize, seed: u64, ta_iters: usize) -> Result<PointSet> {
    let set = match kind {
        Generator::Uniform => uniform_set(n, dim, seed)?,
        Generator::Halton => halton_set(n, dim, seed, true)?,
        Generator::Sobol => sobol_set(n, dim)?,
        Generator::Optimized => optimize(&sobol_set(ta_base_size(n), dim)?, n, ta_iters, seed)?.subset,
        Generator::Imported => return Err(CliError::Usage("IMPORTED sets are read from files".into())),
    };
    Ok(set)
}

pub fn optimize(base: &PointSet, k: usize, iters: usize, seed: u64) -> Result<TaOutcome> {
    if iters == 0 {
        return Err(CliError::Usage("iterations must be positive".into()));
    }
    Ok(ta_search(base, k, TaOptions::new(iters), seed)?)
}

/// Mean L2 star discrepancy of `draws` uniform `k`-sets.
pub fn uniform_mean_l2(k: usize, dim: usize, master: u64, draws: usize) -> Result<f64> {
    let mut total = 0.0;
    for s in 0..draws {
        let seed = mix(master, &[tag("UNIFORM"), k as u64, dim as u64, tag("grid"), s as u64]);
        total += l2_star(&uniform_set(k, dim, seed)?);
    }
    Ok(total / draws as f64)
}

/// Warnock rows for every cached sampler in every dimension, in sampler
/// order then dimension order. UNIFORM rows average [`UNIFORM_DRAWS`] sets;
/// other kinds use the shared cache sets.
pub fn discrepancy_table(
    samplers: &[SamplerSpec],
    dims: &[usize],
    ctx: &SetContext,
    sets: &SetTable,
) -> Result<Vec<DiscrepancyReport>> {
    let mut rows = Vec::new();
    for s in samplers {
        let Some(k) = s.cache else { continue };
        for &dim in dims {
            let row = if s.kind == Generator::Uniform {
                DiscrepancyReport {
                    set_id: s.to_string(),
                    dim,
                    n: k,
                    method: qmc_cmaes::discrepancy::DiscrepancyMethod::Warnock,
                    value: uniform_mean_l2(k, dim, ctx.master_seed, UNIFORM_DRAWS)?,
                    mc_std_error: None,
                }
            } else {
                let set = sets
                    .get(s.kind, k, dim)
                    .ok_or_else(|| CliError::Usage(format!("no {s} set for dimension {dim}")))?;
                DiscrepancyReport::warnock(s.to_string(), set)
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn render_table(rows: &[DiscrepancyReport]) -> String {
    let mut out = format!("{}\n", DiscrepancyReport::CSV_HEADER);
    for r in rows {
        out += &r.csv_row();
        out.push('\n');
    }
    out
}

/// Parses a table written by [`render_table`], keeping Warnock rows only.
pub fn parse_table(text: &str, origin: &str) -> Result<Vec<(String, usize, f64)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Spec {
            path: origin.to_string(),
            line: idx + 1,
            msg: format!("malformed discrepancy row {line:?}"),
        };
        if f.len() != 6 {
            return Err(bad());
        }
        if f[3] != "WARNOCK" {
            continue;
        }
        let dim = f[1].parse().map_err(|_| bad())?;
        let value = f[4].parse().map_err(|_| bad())?;
        out.push((f[0].to_string(), dim, value));
    }
    Ok(out)
}
