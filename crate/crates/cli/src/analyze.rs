//! Aggregation of run records into curves, areas and the discrepancy fit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmc_cmaes::analysis::{
    discrepancy_performance_fit, eaf_auc, eaf_curve, normalize_per_dim, EafCurve, LinearFit, RunRecord,
};
use qmc_cmaes::sampler::SamplerSpec;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::points::parse_table;
use crate::record::{self, write_atomic};

/// Aggregate over all runs of one sampler in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub sampler: SamplerSpec,
    pub dim: usize,
    pub lambda: usize,
    pub runs: usize,
    pub budget: u64,
    pub curve: EafCurve,
    pub auc: f64,
    pub auc_normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimFit {
    pub dim: usize,
    pub fit: LinearFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub n_targets: usize,
    /// Sorted by dimension, then sampler.
    pub cells: Vec<CellSummary>,
    pub fits: Vec<DimFit>,
    pub degenerate_dims: Vec<usize>,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn cell(&self, sampler: SamplerSpec, dim: usize) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.sampler == sampler && c.dim == dim)
    }

    pub fn fit(&self, dim: usize) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.dim == dim).map(|f| &f.fit)
    }
}

/// EAF curve and area of one group of runs.
pub fn summarize(runs: &[RunRecord], n_targets: usize) -> Result<(EafCurve, f64, u64)> {
    let curve = eaf_curve(runs, n_targets)?;
    let budget = runs.iter().map(|r| r.budget).min().unwrap_or(0);
    let auc = eaf_auc(&curve, budget);
    Ok((curve, auc, budget))
}

/// Groups runs by `(dim, sampler)` and joins them with Warnock rows
/// `(set_id, dim, l2_star)` for the fit.
pub fn analyze_records(
    records: &[RunRecord],
    n_targets: usize,
    discrepancy: &[(String, usize, f64)],
) -> Result<Analysis> {
    if records.is_empty() {
        return Err(CliError::Usage("no run records to analyze".into()));
    }
    let mut groups: BTreeMap<(usize, SamplerSpec), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.dim, r.sampler)).or_default().push(r.clone());
    }
    let mut cells = Vec::new();
    let mut auc_table = BTreeMap::new();
    for ((dim, sampler), runs) in &groups {
        let lambda = runs[0].lambda;
        if runs.iter().any(|r| r.lambda != lambda) {
            return Err(CliError::Usage(format!(
                "runs of {sampler} in dimension {dim} mix population sizes"
            )));
        }
        let (curve, auc, budget) = summarize(runs, n_targets)?;
        auc_table.insert((*sampler, *dim), auc);
        cells.push(CellSummary {
            sampler: *sampler,
            dim: *dim,
            lambda,
            runs: runs.len(),
            budget,
            curve,
            auc,
            auc_normalized: f64::NAN,
        });
    }
    let mut warnings = Vec::new();
    let normalized = normalize_per_dim(&auc_table);
    for c in cells.iter_mut() {
        c.auc_normalized = normalized.values[&(c.sampler, c.dim)];
    }
    for d in &normalized.degenerate_dims {
        warnings.push(format!("all AUC values are equal in dimension {d}; normalized to 0.5"));
    }

    let mut fits = Vec::new();
    let mut dims: Vec<usize> = cells.iter().map(|c| c.dim).collect();
    dims.dedup();
    for dim in dims {
        let points: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.dim == dim && c.sampler.cache.is_some())
            .filter_map(|c| {
                let id = c.sampler.to_string();
                discrepancy
                    .iter()
                    .find(|(s, d, _)| *s == id && *d == dim)
                    .map(|&(_, _, l2)| (l2.log10(), c.auc))
            })
            .collect();
        if points.len() < 3 {
            if !discrepancy.is_empty() {
                warnings.push(format!(
                    "dimension {dim}: {} cached samplers with a known discrepancy; fit skipped",
                    points.len()
                ));
            }
            continue;
        }
        let fit = discrepancy_performance_fit(&points)?;
        if fit.degenerate {
            warnings.push(format!("dimension {dim}: zero variance in the fit inputs"));
        }
        fits.push(DimFit { dim, fit });
    }
    Ok(Analysis {
        n_targets,
        cells,
        fits,
        degenerate_dims: normalized.degenerate_dims,
        warnings,
    })
}

pub fn eaf_csv(a: &Analysis) -> String {
    let mut out = String::from("sampler,k,dim,budget,value\n");
    for c in &a.cells {
        for (t, v) in c.curve.budget_grid.iter().zip(&c.curve.values) {
            writeln!(out, "{},{},{},{},{}", c.sampler.kind, c.sampler.cache_label(), c.dim, t, v).unwrap();
        }
    }
    out
}

pub fn auc_csv(a: &Analysis) -> String {
    let mut out = String::from("sampler,k,dim,auc,auc_normalized\n");
    for c in &a.cells {
        writeln!(
            out,
            "{},{},{},{},{}",
            c.sampler.kind,
            c.sampler.cache_label(),
            c.dim,
            c.auc,
            c.auc_normalized
        )
        .unwrap();
    }
    out
}

pub fn fit_csv(a: &Analysis) -> String {
    let mut out = String::from("dim,slope,intercept,pearson_r\n");
    for f in &a.fits {
        writeln!(out, "{},{},{},{}", f.dim, f.fit.slope, f.fit.intercept, f.fit.pearson_r).unwrap();
    }
    out
}

pub fn plot_json(a: &Analysis, discrepancy: &[(String, usize, f64)]) -> String {
    let curves: Vec<_> = a
        .cells
        .iter()
        .map(|c| {
            json!({
                "sampler": c.sampler.kind.as_str(),
                "k": c.sampler.cache_label(),
                "dim": c.dim,
                "lambda": c.lambda,
                "runs": c.runs,
                "budget": c.curve.budget_grid,
                "value": c.curve.values,
            })
        })
        .collect();
    let auc: Vec<_> = a
        .cells
        .iter()
        .map(|c| {
            json!({
                "sampler": c.sampler.kind.as_str(),
                "k": c.sampler.cache_label(),
                "dim": c.dim,
                "auc": c.auc,
                "auc_normalized": c.auc_normalized,
            })
        })
        .collect();
    let scatter: Vec<_> = a
        .cells
        .iter()
        .filter_map(|c| {
            let id = c.sampler.to_string();
            discrepancy
                .iter()
                .find(|(s, d, _)| *s == id && *d == c.dim)
                .map(|&(_, _, l2)| json!({"set_id": id, "dim": c.dim, "log10_l2_star": l2.log10(), "auc": c.auc}))
        })
        .collect();
    let fits: Vec<_> = a
        .fits
        .iter()
        .map(|f| {
            json!({
                "dim": f.dim,
                "slope": f.fit.slope,
                "intercept": f.fit.intercept,
                "pearson_r": f.fit.pearson_r,
                "n": f.fit.n,
                "degenerate": f.fit.degenerate,
            })
        })
        .collect();
    let doc = json!({
        "meta": {
            "budget_axis": "log10",
            "targets": a.n_targets,
            "target_range": [1e-8, 1e2],
            "normalization": "min-max per dimension",
            "degenerate_dims": a.degenerate_dims,
        },
        "eaf_curves": curves,
        "auc": auc,
        "discrepancy_vs_auc": scatter,
        "fits": fits,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json rendering cannot fail");
    text.push('\n');
    text
}

/// Directory holding the `.rec` files: `<dir>/records` when present.
pub fn records_dir(dir: &Path) -> PathBuf {
    let sub = dir.join("records");
    if sub.is_dir() {
        sub
    } else {
        dir.to_path_buf()
    }
}

pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    record::list(&records_dir(dir))?
        .iter()
        .map(|p| record::load(p).map(|rf| rf.record))
        .collect()
}

pub fn load_discrepancy(path: &Path) -> Result<Vec<(String, usize, f64)>> {
    if !path.is_file() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text, &path.display().to_string())
}

/// Analyzes `records` and writes the four outputs into `out`.
pub fn write_analysis(
    records: &[RunRecord],
    discrepancy: &[(String, usize, f64)],
    out: &Path,
    n_targets: usize,
) -> Result<Analysis> {
    let analysis = analyze_records(records, n_targets, discrepancy)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_atomic(&out.join("eaf_curve.csv"), &eaf_csv(&analysis))?;
    write_atomic(&out.join("auc.csv"), &auc_csv(&analysis))?;
    write_atomic(&out.join("fit.csv"), &fit_csv(&analysis))?;
    write_atomic(&out.join("plotdata.json"), &plot_json(&analysis, discrepancy))?;
    Ok(analysis)
}

/// Reads every record and the optional `discrepancy.csv` under `dir`.
pub fn analyze_dir(dir: &Path, out: &Path, n_targets: usize) -> Result<Analysis> {
    let records = load_records(dir)?;
    let discrepancy = load_discrepancy(&dir.join("discrepancy.csv"))?;
    write_analysis(&records, &discrepancy, out, n_targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmc_cmaes::lds::Generator;
    use qmc_cmaes::trajectory::Trajectory;

    fn rec(sampler: SamplerSpec, dim: usize, points: Vec<(u64, f64)>) -> RunRecord {
        RunRecord {
            fid: 1,
            iid: 1,
            dim,
            sampler,
            lambda: 6,
            seed: 0,
            budget: 1000,
            evaluations: points.last().unwrap().0,
            trajectory: Trajectory::from_points(points),
        }
    }

    #[test]
    fn all_attaining_run_has_unit_area() {
        let s = SamplerSpec::endless(Generator::Sobol);
        let a = analyze_records(&[rec(s, 2, vec![(1, 0.0)])], 51, &[]).unwrap();
        assert_eq!(a.cells.len(), 1);
        assert!((a.cells[0].auc - 1.0).abs() < 1e-12);
        assert!(auc_csv(&a).lines().nth(1).unwrap().starts_with("SOBOL,inf,2,1,"));
    }

    #[test]
    fn two_record_toy() {
        // One run solves at evaluation 1, the other attains nothing; the
        // curve is 0.5 everywhere and so is the area.
        let s = SamplerSpec::cached(Generator::Uniform, 16);
        let runs = [rec(s, 2, vec![(1, 0.0)]), rec(s, 2, vec![(1, 1e6), (1000, 1e6)])];
        let a = analyze_records(&runs, 51, &[]).unwrap();
        assert!((a.cells[0].auc - 0.5).abs() < 1e-12);
        assert!(a.cells[0].curve.values.iter().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn fit_joins_discrepancy_rows() {
        let mk = |k: usize, solve_at: u64| {
            rec(SamplerSpec::cached(Generator::Sobol, k), 2, vec![(1, 1e3), (solve_at, 0.0), (1000, 0.0)])
        };
        let runs = [mk(16, 500), mk(32, 100), mk(64, 10)];
        let disc = vec![
            ("SOBOL-16".to_string(), 2, 0.1),
            ("SOBOL-32".to_string(), 2, 0.05),
            ("SOBOL-64".to_string(), 2, 0.02),
        ];
        let a = analyze_records(&runs, 51, &disc).unwrap();
        let fit = a.fit(2).unwrap();
        assert!(fit.slope < 0.0 && fit.pearson_r < 0.0);
        assert_eq!(fit_csv(&a).lines().count(), 2);
        let doc: serde_json::Value = serde_json::from_str(&plot_json(&a, &disc)).unwrap();
        assert_eq!(doc["meta"]["budget_axis"], "log10");
        assert_eq!(doc["discrepancy_vs_auc"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn mixed_population_sizes_rejected() {
        let s = SamplerSpec::endless(Generator::Sobol);
        let mut b = rec(s, 2, vec![(1, 0.0)]);
        b.lambda = 7;
        assert!(analyze_records(&[rec(s, 2, vec![(1, 0.0)]), b], 51, &[]).is_err());
    }
}
