//! Run-record files.
//!
//! Metadata comes first as `# key=value` lines, followed by one
//! `evaluations precision` row per trajectory checkpoint. Generation batch
//! hashes, when kept, are `# batch=<hex>` lines in generation order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qmc_cmaes::analysis::RunRecord;
use qmc_cmaes::trajectory::Trajectory;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RecordFile {
    pub record: RunRecord,
    /// Canonical description of the cell that produced the run.
    pub cell: String,
    pub generations: u64,
    /// Why the run ended before its budget, if it broke down numerically.
    pub breakdown: Option<String>,
    pub batch_hashes: Vec<u64>,
}

pub fn render(rf: &RecordFile) -> String {
    let r = &rf.record;
    let mut out = String::new();
    writeln!(out, "# cell={}", rf.cell).unwrap();
    writeln!(out, "# fid={}", r.fid).unwrap();
    writeln!(out, "# iid={}", r.iid).unwrap();
    writeln!(out, "# dim={}", r.dim).unwrap();
    writeln!(out, "# sampler={}", r.sampler).unwrap();
    writeln!(out, "# lambda={}", r.lambda).unwrap();
    writeln!(out, "# seed={}", r.seed).unwrap();
    writeln!(out, "# budget={}", r.budget).unwrap();
    writeln!(out, "# evaluations={}", r.evaluations).unwrap();
    writeln!(out, "# generations={}", rf.generations).unwrap();
    if let Some(b) = &rf.breakdown {
        writeln!(out, "# breakdown={}", b.replace('\n', " ")).unwrap();
    }
    for h in &rf.batch_hashes {
        writeln!(out, "# batch={h:016x}").unwrap();
    }
    for (t, p) in r.trajectory.points() {
        writeln!(out, "{t} {p:?}").unwrap();
    }
    out
}

pub fn parse(text: &str, origin: &str) -> Result<RecordFile> {
    let bad = |line: usize, msg: String| CliError::Spec {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut meta: Vec<(usize, String, String)> = Vec::new();
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(rest) = raw.strip_prefix('#') {
            let (k, v) = rest
                .trim()
                .split_once('=')
                .ok_or_else(|| bad(line, format!("malformed metadata {raw:?}")))?;
            meta.push((line, k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        let mut it = raw.split_whitespace();
        let (Some(t), Some(p), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad(line, format!("expected `evaluations precision`, found {raw:?}")));
        };
        let t: u64 = t.parse().map_err(|_| bad(line, format!("bad evaluation count {t:?}")))?;
        let p: f64 = p.parse().map_err(|_| bad(line, format!("bad precision {p:?}")))?;
        points.push((t, p));
    }

    let get = |key: &str| -> Result<(usize, &str)> {
        meta.iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.as_str()))
            .ok_or_else(|| bad(0, format!("missing metadata key {key:?}")))
    };
    macro_rules! field {
        ($key:literal) => {{
            let (line, v) = get($key)?;
            v.parse().map_err(|_| bad(line, format!("bad {} {v:?}", $key)))?
        }};
    }
    let batch_hashes = meta
        .iter()
        .filter(|(_, k, _)| k == "batch")
        .map(|(l, _, v)| u64::from_str_radix(v, 16).map_err(|_| bad(*l, format!("bad batch hash {v:?}"))))
        .collect::<Result<Vec<u64>>>()?;
    let trajectory = Trajectory::from_points(points);
    if !trajectory.is_well_formed() {
        return Err(bad(0, "trajectory is not increasing in evaluations and nonincreasing in precision".into()));
    }
    let record = RunRecord {
        fid: field!("fid"),
        iid: field!("iid"),
        dim: field!("dim"),
        sampler: field!("sampler"),
        lambda: field!("lambda"),
        seed: field!("seed"),
        budget: field!("budget"),
        evaluations: field!("evaluations"),
        trajectory,
    };
    Ok(RecordFile {
        cell: get("cell")?.1.to_string(),
        generations: field!("generations"),
        breakdown: get("breakdown").ok().map(|(_, v)| v.to_string()),
        batch_hashes,
        record,
    })
}

pub fn load(path: &Path) -> Result<RecordFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, &path.display().to_string())
}

/// Writes through a temporary sibling and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// All `*.rec` files under `dir`, sorted by name.
pub fn list(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "rec") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
