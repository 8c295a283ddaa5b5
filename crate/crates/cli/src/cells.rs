//! One benchmark run per grid cell, with all seeds derived from the master
//! seed.
//!
//! * `sub_seed = mix(master, [fid, iid, tag(kind), k, dim])`, with `k = 0`
//!   for endless samplers and the population size folded in when it is
//!   overridden. It seeds the uniform stream, the cache permutation and the
//!   per-run uniform cache set.
//! * The start point depends on `(master, fid, iid, dim)` only, so every
//!   sampler starts a given instance from the same mean.
//! * Fixed cache sets (HALTON, SOBOL, OPTIMIZED, IMPORTED) depend on
//!   `(master, kind, k, dim)` and are shared by all runs of a sampler.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qmc_cmaes::analysis::RunRecord;
use qmc_cmaes::bench::make_problem;
use qmc_cmaes::cmaes::{default_params, initial_mean, run, CmaState, RunConfig};
use qmc_cmaes::discrepancy::ta_subset;
use qmc_cmaes::lds::{
    halton_set, load_point_set, make_cached_source, make_endless_source, sobol_set, uniform_set, EndlessKind,
    Generator, PointSet, SamplerSource,
};
use qmc_cmaes::sampler::SamplerSpec;
use qmc_cmaes::seed::{fnv1a, fnv1a_f64, mix, tag};

use crate::error::{CliError, Result};
use crate::record::RecordFile;

/// Inputs shared by every cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SetContext {
    pub master_seed: u64,
    pub ta_iters: usize,
    pub import_dir: Option<PathBuf>,
}

/// Smallest Sobol base used for optimized subsets.
pub const MIN_TA_BASE: usize = 512;

pub fn ta_base_size(k: usize) -> usize {
    MIN_TA_BASE.max(8 * k)
}

pub fn sub_seed(master: u64, fid: u32, iid: u32, sampler: SamplerSpec, dim: usize, lambda: Option<usize>) -> u64 {
    let k = sampler.cache.unwrap_or(0) as u64;
    let s = mix(master, &[fid as u64, iid as u64, tag(sampler.kind.as_str()), k, dim as u64]);
    match lambda {
        Some(l) => mix(s, &[l as u64]),
        None => s,
    }
}

pub fn init_seed(master: u64, fid: u32, iid: u32, dim: usize) -> u64 {
    mix(master, &[fid as u64, iid as u64, dim as u64, tag("init")])
}

/// Scrambling seed of the Halton sequence in `dim` dimensions.
pub fn halton_seed(master: u64, dim: usize) -> u64 {
    mix(master, &[tag("HALTON"), dim as u64])
}

pub fn imported_path(dir: &Path, k: usize, dim: usize) -> PathBuf {
    dir.join(format!("imported-k{k}-d{dim}.txt"))
}

/// The cache set shared by all runs of a fixed-set sampler.
pub fn fixed_set(kind: Generator, k: usize, dim: usize, ctx: &SetContext) -> Result<PointSet> {
    let set = match kind {
        Generator::Uniform => {
            return Err(CliError::Usage("UNIFORM cache sets are drawn per run".into()));
        }
        Generator::Halton => halton_set(k, dim, halton_seed(ctx.master_seed, dim), true)?,
        Generator::Sobol => {
            let set = sobol_set(k, dim)?;
            if set.len() != k {
                return Err(CliError::Usage(format!("SOBOL cache size {k} is not a power of two")));
            }
            set
        }
        Generator::Optimized => {
            let base = sobol_set(ta_base_size(k), dim)?;
            let seed = mix(ctx.master_seed, &[tag("OPTIMIZE"), k as u64, dim as u64]);
            ta_subset(&base, k, ctx.ta_iters, seed)?
        }
        Generator::Imported => {
            let dir = ctx
                .import_dir
                .as_deref()
                .ok_or_else(|| CliError::Usage("IMPORTED samplers need an import directory".into()))?;
            let path = imported_path(dir, k, dim);
            let set = load_point_set(&path)?;
            if set.len() != k || set.dim() != dim {
                return Err(CliError::Usage(format!(
                    "{}: expected {k} points in {dim} dimensions, found {} in {}",
                    path.display(),
                    set.len(),
                    set.dim()
                )));
            }
            set
        }
    };
    Ok(set)
}

/// Fixed cache sets keyed by `(kind, k, dim)`.
#[derive(Debug, Clone, Default)]
pub struct SetTable {
    sets: BTreeMap<(Generator, usize, usize), PointSet>,
}

impl SetTable {
    /// Builds every fixed set the samplers need in the given dimensions.
    pub fn build(samplers: &[SamplerSpec], dims: &[usize], ctx: &SetContext) -> Result<Self> {
        let mut sets = BTreeMap::new();
        for s in samplers {
            let Some(k) = s.cache else { continue };
            if s.kind == Generator::Uniform {
                continue;
            }
            for &dim in dims {
                if let std::collections::btree_map::Entry::Vacant(e) = sets.entry((s.kind, k, dim)) {
                    e.insert(fixed_set(s.kind, k, dim, ctx)?);
                }
            }
        }
        Ok(Self { sets })
    }

    pub fn get(&self, kind: Generator, k: usize, dim: usize) -> Option<&PointSet> {
        self.sets.get(&(kind, k, dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Generator, usize, usize), &PointSet)> {
        self.sets.iter()
    }
}

/// One run of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub fid: u32,
    pub iid: u32,
    pub dim: usize,
    pub sampler: SamplerSpec,
    pub lambda: Option<usize>,
    pub budget: u64,
}

impl Cell {
    /// Canonical description; it changes whenever anything that affects the
    /// run's output changes.
    pub fn key(&self, ctx: &SetContext, sets: &SetTable) -> String {
        let mut key = format!(
            "fid={} iid={} dim={} sampler={} lambda={} budget={} master_seed={}",
            self.fid,
            self.iid,
            self.dim,
            self.sampler,
            self.lambda.map_or("default".to_string(), |l| l.to_string()),
            self.budget,
            ctx.master_seed
        );
        if let Some(set) = self.fixed_set(sets) {
            key += &format!(" set={:016x}", fnv1a_f64(set.coords()));
        }
        key
    }

    pub fn file_name(&self, ctx: &SetContext, sets: &SetTable) -> String {
        format!(
            "f{}-i{}-d{}-{}-{:016x}.rec",
            self.fid,
            self.iid,
            self.dim,
            self.sampler,
            fnv1a(self.key(ctx, sets).as_bytes())
        )
    }

    pub fn sub_seed(&self, ctx: &SetContext) -> u64 {
        sub_seed(ctx.master_seed, self.fid, self.iid, self.sampler, self.dim, self.lambda)
    }

    fn fixed_set<'a>(&self, sets: &'a SetTable) -> Option<&'a PointSet> {
        self.sampler.cache.and_then(|k| sets.get(self.sampler.kind, k, self.dim))
    }

    pub fn source(&self, ctx: &SetContext, sets: &SetTable) -> Result<SamplerSource> {
        let seed = self.sub_seed(ctx);
        let dim = self.dim;
        let src = match (self.sampler.kind, self.sampler.cache) {
            (Generator::Uniform, None) => make_endless_source(EndlessKind::Uniform, dim, seed)?,
            (Generator::Halton, None) => make_endless_source(
                EndlessKind::Halton { scrambled: true },
                dim,
                halton_seed(ctx.master_seed, dim),
            )?,
            (Generator::Sobol, None) => make_endless_source(EndlessKind::Sobol, dim, seed)?,
            (Generator::Uniform, Some(k)) => {
                make_cached_source(uniform_set(k, dim, mix(seed, &[tag("set")]))?, seed)
            }
            (kind, Some(k)) => {
                let set = self.fixed_set(sets).cloned().ok_or_else(|| {
                    CliError::Usage(format!("no {kind}-{k} set built for dimension {dim}"))
                })?;
                make_cached_source(set, seed)
            }
            (kind, None) => return Err(CliError::Usage(format!("{kind} needs a finite cache size"))),
        };
        Ok(src)
    }

    /// Executes the run.
    pub fn execute(&self, ctx: &SetContext, sets: &SetTable, record_batches: bool) -> Result<RecordFile> {
        let params = default_params(self.dim, self.lambda)?;
        let m0 = initial_mean(self.dim, init_seed(ctx.master_seed, self.fid, self.iid, self.dim));
        let state = CmaState::new(&params, &m0)?;
        let mut problem = make_problem(self.fid, self.iid, self.dim)?;
        let mut source = self.source(ctx, sets)?;
        let mut config = RunConfig::new(self.budget);
        config.record_batches = record_batches;
        let out = run(&mut problem, &params, state, &mut source, &config)?;
        Ok(RecordFile {
            record: RunRecord {
                fid: self.fid,
                iid: self.iid,
                dim: self.dim,
                sampler: self.sampler,
                lambda: params.lambda,
                seed: self.sub_seed(ctx),
                budget: self.budget,
                evaluations: out.evaluations,
                trajectory: out.trajectory,
            },
            cell: self.key(ctx, sets),
            generations: out.generations,
            breakdown: out.breakdown,
            batch_hashes: out.batch_hashes,
        })
    }
}

/// Smallest `p` such that `hashes[g] == hashes[g + p]` for every `g`, if
/// the sequence is long enough to show two full periods.
pub fn batch_period(hashes: &[u64]) -> Option<usize> {
    (1..=hashes.len() / 2).find(|&p| (0..hashes.len() - p).all(|g| hashes[g] == hashes[g + p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> SetContext {
        SetContext {
            master_seed: 5,
            ta_iters: 200,
            import_dir: None,
        }
    }

    #[test]
    fn seeds_change_with_each_axis() {
        let s = SamplerSpec::cached(Generator::Sobol, 64);
        let base = sub_seed(1, 1, 1, s, 2, None);
        assert_ne!(base, sub_seed(2, 1, 1, s, 2, None));
        assert_ne!(base, sub_seed(1, 2, 1, s, 2, None));
        assert_ne!(base, sub_seed(1, 1, 2, s, 2, None));
        assert_ne!(base, sub_seed(1, 1, 1, SamplerSpec::cached(Generator::Sobol, 32), 2, None));
        assert_ne!(base, sub_seed(1, 1, 1, SamplerSpec::cached(Generator::Halton, 64), 2, None));
        assert_ne!(base, sub_seed(1, 1, 1, s, 5, None));
        assert_ne!(base, sub_seed(1, 1, 1, s, 2, Some(16)));
        assert_eq!(base, sub_seed(1, 1, 1, s, 2, None));
    }

    #[test]
    fn fixed_sets() {
        let c = ctx();
        assert_eq!(fixed_set(Generator::Sobol, 32, 3, &c).unwrap().len(), 32);
        assert!(fixed_set(Generator::Sobol, 48, 3, &c).is_err());
        let h16 = fixed_set(Generator::Halton, 16, 3, &c).unwrap();
        let h32 = fixed_set(Generator::Halton, 32, 3, &c).unwrap();
        assert_eq!(h16.coords(), &h32.coords()[..48]);
        let opt = fixed_set(Generator::Optimized, 16, 2, &c).unwrap();
        assert_eq!(opt.len(), 16);
        assert!(fixed_set(Generator::Imported, 16, 2, &c).is_err());
        assert!(fixed_set(Generator::Uniform, 16, 2, &c).is_err());
    }

    #[test]
    fn key_tracks_the_set() {
        let samplers = [SamplerSpec::cached(Generator::Optimized, 16)];
        let a = SetTable::build(&samplers, &[2], &ctx()).unwrap();
        let mut other = ctx();
        other.ta_iters = 300;
        let b = SetTable::build(&samplers, &[2], &other).unwrap();
        let cell = Cell {
            fid: 1,
            iid: 1,
            dim: 2,
            sampler: samplers[0],
            lambda: None,
            budget: 200,
        };
        assert_ne!(cell.key(&ctx(), &a), cell.key(&ctx(), &b));
        assert_eq!(cell.file_name(&ctx(), &a), cell.file_name(&ctx(), &a));
    }

    #[test]
    fn periods() {
        assert_eq!(batch_period(&[7, 7, 7, 7]), Some(1));
        assert_eq!(batch_period(&[1, 2, 3, 4, 1, 2, 3, 4, 1]), Some(4));
        assert_eq!(batch_period(&[1, 2, 3, 4, 1, 2, 3]), None);
        assert_eq!(batch_period(&[1, 2, 3]), None);
    }
}
