//! Experiment spec files.
//!
//! Plain `key = value` lines; list values are comma separated and `#` starts
//! a comment. Unknown keys, repeated keys and malformed values are rejected
//! with their line number.
//!
//! ```text
//! dims = 2, 5
//! fids = 1, 2, 6
//! instances = 10
//! samplers = UNIFORM-inf, SOBOL-inf, SOBOL-128
//! budget_multiplier = 2000
//! master_seed = 1
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qmc_cmaes::bench::FUNCTION_IDS;
use qmc_cmaes::lds::Generator;
use qmc_cmaes::sampler::{SamplerSpec, CACHE_SIZES};

use crate::error::{CliError, Result};

pub const DEFAULT_DIMS: [usize; 3] = [2, 5, 10];
pub const DEFAULT_INSTANCES: u32 = 10;
pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 2000;
pub const MIN_BUDGET_MULTIPLIER: u64 = 100;
pub const DEFAULT_TA_ITERS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dims: Vec<usize>,
    pub fids: Vec<u32>,
    /// Instances run are `1..=instances`.
    pub instances: u32,
    pub samplers: Vec<SamplerSpec>,
    pub lambda: Option<usize>,
    /// Evaluation budget per dimension.
    pub budget_multiplier: u64,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    /// Threshold Accepting iterations for OPTIMIZED sets.
    pub ta_iters: usize,
    /// Directory holding IMPORTED sets named `imported-k<k>-d<dim>.txt`.
    pub import_dir: Option<PathBuf>,
}

/// UNIFORM, HALTON and SOBOL at every cache size and endless, plus
/// OPTIMIZED at every cache size.
pub fn default_samplers() -> Vec<SamplerSpec> {
    let mut out = Vec::new();
    for kind in [Generator::Uniform, Generator::Halton, Generator::Sobol] {
        out.push(SamplerSpec::endless(kind));
        out.extend(CACHE_SIZES.iter().map(|&k| SamplerSpec::cached(kind, k)));
    }
    out.extend(CACHE_SIZES.iter().map(|&k| SamplerSpec::cached(Generator::Optimized, k)));
    out
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            fids: FUNCTION_IDS.to_vec(),
            instances: DEFAULT_INSTANCES,
            samplers: default_samplers(),
            lambda: None,
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            master_seed: 0,
            output: None,
            ta_iters: DEFAULT_TA_ITERS,
            import_dir: None,
        }
    }
}

impl ExperimentSpec {
    pub fn budget(&self, dim: usize) -> u64 {
        self.budget_multiplier * dim as u64
    }

    pub fn iids(&self) -> impl Iterator<Item = u32> {
        1..=self.instances
    }

    /// Number of runs in the full grid.
    pub fn cell_count(&self) -> usize {
        self.dims.len() * self.fids.len() * self.instances as usize * self.samplers.len()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses spec text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut spec = Self::default();
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| CliError::Spec {
                path: origin.to_string(),
                line,
                msg,
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("key {key:?} given twice")));
            }
            match key {
                "dims" => spec.dims = parse_list(value).map_err(err)?,
                "fids" => spec.fids = parse_list(value).map_err(err)?,
                "instances" => spec.instances = parse_one(value).map_err(err)?,
                "samplers" => spec.samplers = parse_list(value).map_err(err)?,
                "lambda" => {
                    spec.lambda = match value {
                        "default" => None,
                        v => Some(parse_one(v).map_err(err)?),
                    }
                }
                "budget_multiplier" => spec.budget_multiplier = parse_one(value).map_err(err)?,
                "master_seed" => spec.master_seed = parse_one(value).map_err(err)?,
                "output" => spec.output = Some(PathBuf::from(value)),
                "ta_iters" => spec.ta_iters = parse_one(value).map_err(err)?,
                "import_dir" => spec.import_dir = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
            spec.check_key(key).map_err(err)?;
        }
        Ok(spec)
    }

    fn check_key(&self, key: &str) -> std::result::Result<(), String> {
        match key {
            "dims" if self.dims.is_empty() || self.dims.contains(&0) => {
                Err("dims must be positive and nonempty".into())
            }
            "dims" if self.dims.contains(&1) => Err("benchmark functions need dim >= 2".into()),
            "fids" => match self.fids.iter().find(|f| !FUNCTION_IDS.contains(f)) {
                Some(f) => Err(format!("unknown function id {f} (available: {FUNCTION_IDS:?})")),
                None if self.fids.is_empty() => Err("fids must be nonempty".into()),
                None => Ok(()),
            },
            "instances" if self.instances == 0 => Err("instances must be positive".into()),
            "samplers" => {
                for s in &self.samplers {
                    if let Some(k) = s.cache {
                        if !CACHE_SIZES.contains(&k) {
                            return Err(format!("cache size {k} of {s} is not one of {CACHE_SIZES:?}"));
                        }
                    }
                }
                if self.samplers.is_empty() {
                    return Err("samplers must be nonempty".into());
                }
                Ok(())
            }
            "lambda" if self.lambda.is_some_and(|l| l < 2) => Err("lambda must be at least 2".into()),
            "budget_multiplier" if self.budget_multiplier < MIN_BUDGET_MULTIPLIER => Err(format!(
                "budget_multiplier must be at least {MIN_BUDGET_MULTIPLIER}"
            )),
            "ta_iters" if self.ta_iters == 0 => Err("ta_iters must be positive".into()),
            _ => Ok(()),
        }
    }

    /// Canonical text form; parsing it gives back the same spec.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        out += &format!("dims = {}\n", join(self.dims.iter().map(|d| d.to_string()).collect()));
        out += &format!("fids = {}\n", join(self.fids.iter().map(|d| d.to_string()).collect()));
        out += &format!("instances = {}\n", self.instances);
        out += &format!("samplers = {}\n", join(self.samplers.iter().map(|s| s.to_string()).collect()));
        out += &format!(
            "lambda = {}\n",
            self.lambda.map_or("default".to_string(), |l| l.to_string())
        );
        out += &format!("budget_multiplier = {}\n", self.budget_multiplier);
        out += &format!("master_seed = {}\n", self.master_seed);
        out += &format!("ta_iters = {}\n", self.ta_iters);
        if let Some(p) = &self.output {
            out += &format!("output = {}\n", p.display());
        }
        if let Some(p) = &self.import_dir {
            out += &format!("import_dir = {}\n", p.display());
        }
        out
    }
}

fn parse_one<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| format!("cannot parse {value:?}: {e}"))
}

/// Comma-separated list; duplicates are dropped, first occurrence wins.
pub fn parse_list<T: FromStr + PartialEq>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let mut out: Vec<T> = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v = parse_one(item)?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "\
# desk run
dims = 2, 5
fids = 1,2
instances = 3   # short
samplers = UNIFORM-inf, sobol-128
lambda = 16
budget_multiplier = 100
master_seed = 42
output = out/run1
ta_iters = 500
";
        let s = ExperimentSpec::parse(text, "t").unwrap();
        assert_eq!(s.dims, vec![2, 5]);
        assert_eq!(s.fids, vec![1, 2]);
        assert_eq!(s.instances, 3);
        assert_eq!(s.samplers.len(), 2);
        assert_eq!(s.lambda, Some(16));
        assert_eq!(s.budget(5), 500);
        assert_eq!(s.master_seed, 42);
        assert_eq!(s.output, Some(PathBuf::from("out/run1")));
        assert_eq!(s.ta_iters, 500);
        assert_eq!(s.cell_count(), 2 * 2 * 3 * 2);
        assert_eq!(ExperimentSpec::parse(&s.to_text(), "t").unwrap(), s);
    }

    #[test]
    fn defaults() {
        let s = ExperimentSpec::parse("", "t").unwrap();
        assert_eq!(s.dims, vec![2, 5, 10]);
        assert_eq!(s.fids.len(), 10);
        assert_eq!(s.instances, 10);
        assert_eq!(s.budget_multiplier, 2000);
        assert_eq!(s.samplers.len(), 23);
    }

    fn line_of(text: &str) -> usize {
        match ExperimentSpec::parse(text, "t").unwrap_err() {
            CliError::Spec { line, .. } => line,
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("dims = 2\ncolour = red\n"), 2);
        assert_eq!(line_of("\n\nbudget_multiplier = 50"), 3);
        assert_eq!(line_of("samplers = SOBOL-100"), 1);
        assert_eq!(line_of("samplers = OPTIMIZED-inf"), 1);
        assert_eq!(line_of("fids = 1, 99"), 1);
        assert_eq!(line_of("dims = 2\ndims = 5"), 2);
        assert_eq!(line_of("dims 2"), 1);
        assert_eq!(line_of("lambda = 1"), 1);
        assert_eq!(line_of("instances = x"), 1);
    }
}
