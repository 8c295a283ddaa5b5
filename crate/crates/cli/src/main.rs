use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmc_cmaes::analysis::DEFAULT_TARGETS;
use qmc_cmaes::bench::FUNCTION_IDS;
use qmc_cmaes::discrepancy::DiscrepancyReport;
use qmc_cmaes::lds::{load_point_set, sobol_set, write_point_set, Generator};
use qmc_cmaes::sampler::{SamplerSpec, CACHE_SIZES};

use qmc_cmaes_cli::analyze::analyze_dir;
use qmc_cmaes_cli::cells::{Cell, SetContext, SetTable};
use qmc_cmaes_cli::experiment::run_experiment;
use qmc_cmaes_cli::lambda_study::{self, LambdaStudy};
use qmc_cmaes_cli::points::{discrepancy_table, generate, optimize, render_table};
use qmc_cmaes_cli::record;
use qmc_cmaes_cli::spec::{ExperimentSpec, DEFAULT_BUDGET_MULTIPLIER, DEFAULT_TA_ITERS};
use qmc_cmaes_cli::{CliError, Result};

/// Low-discrepancy sampling for CMA-ES: point sets, discrepancies,
/// benchmark sweeps and their analysis.
#[derive(Parser)]
#[command(name = "qmc-cmaes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a point set file.
    GenPoints(GenPoints),
    /// L2 star discrepancy of a point set, or the full table with --grid.
    Discrepancy(Discrepancy),
    /// Select a low-discrepancy subset of a base set by Threshold Accepting.
    OptimizeSubset(OptimizeSubset),
    /// One optimizer run; writes a run record.
    Run(RunCmd),
    /// Run every cell of an experiment spec, then analyze.
    Experiment(ExperimentCmd),
    /// Attainment curves, areas and the discrepancy fit of a record directory.
    Analyze(AnalyzeCmd),
    /// Compare cache sizes at population sizes 15 and 16.
    LambdaStudy(LambdaStudyCmd),
}

#[derive(Args)]
struct GenPoints {
    #[arg(long)]
    kind: Generator,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Threshold Accepting iterations for OPTIMIZED sets.
    #[arg(long, default_value_t = DEFAULT_TA_ITERS)]
    ta_iters: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Discrepancy {
    /// Point set file. Without it the set comes from --kind, --n and --dim.
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file")]
    kind: Option<Generator>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a Monte-Carlo estimate and check it against the closed form.
    #[arg(long)]
    mc_check: bool,
    #[arg(long, default_value_t = 1_000_000)]
    mc_samples: usize,
    /// Add the exact L-infinity star discrepancy.
    #[arg(long)]
    linf: bool,
    /// Table over all kinds, cache sizes and --dims.
    #[arg(long, conflicts_with_all = ["file", "kind"])]
    grid: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 5, 10])]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = CACHE_SIZES)]
    ks: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TA_ITERS)]
    ta_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeSubset {
    /// Base point set file; a Sobol base of --base-size points otherwise.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long, conflicts_with = "base")]
    base_size: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_TA_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunCmd {
    #[arg(long)]
    fid: u32,
    #[arg(long, default_value_t = 1)]
    iid: u32,
    #[arg(long)]
    dim: usize,
    /// Sampler such as UNIFORM-inf or SOBOL-128.
    #[arg(long, default_value = "UNIFORM-inf")]
    sampler: SamplerSpec,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluation budget; 2000 per dimension when omitted.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TA_ITERS)]
    ta_iters: usize,
    #[arg(long)]
    import_dir: Option<PathBuf>,
    /// Store a hash of every generation's raw points.
    #[arg(long)]
    record_batches: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentCmd {
    spec: PathBuf,
    /// Output directory; overrides the spec's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the spec's `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct AnalyzeCmd {
    /// Experiment directory or directory of .rec files.
    dir: PathBuf,
    /// Output directory; defaults to DIR.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TARGETS)]
    targets: usize,
}

#[derive(Args)]
struct LambdaStudyCmd {
    #[arg(long, default_value = "OPTIMIZED")]
    kind: Generator,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 5])]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128])]
    ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [15usize, 16])]
    lambdas: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = FUNCTION_IDS)]
    fids: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    instances: u32,
    #[arg(long, default_value_t = DEFAULT_BUDGET_MULTIPLIER)]
    budget_multiplier: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TA_ITERS)]
    ta_iters: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            record::write_atomic(path, text)
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn gen_points(a: GenPoints) -> Result<()> {
    let set = generate(a.kind, a.n, a.dim, a.seed, a.ta_iters)?;
    emit(a.out.as_deref(), &write_point_set(&set))
}

fn discrepancy(a: Discrepancy) -> Result<()> {
    if a.grid {
        let ctx = SetContext {
            master_seed: a.seed,
            ta_iters: a.ta_iters,
            import_dir: None,
        };
        let mut samplers = Vec::new();
        for kind in [Generator::Uniform, Generator::Halton, Generator::Sobol, Generator::Optimized] {
            samplers.extend(a.ks.iter().map(|&k| SamplerSpec::cached(kind, k)));
        }
        let sets = SetTable::build(&samplers, &a.dims, &ctx)?;
        let rows = discrepancy_table(&samplers, &a.dims, &ctx, &sets)?;
        return emit(a.out.as_deref(), &render_table(&rows));
    }
    let (set, id) = match (&a.file, a.kind) {
        (Some(path), _) => (load_point_set(path)?, path.display().to_string()),
        (None, Some(kind)) => {
            let (Some(n), Some(dim)) = (a.n, a.dim) else {
                return Err(CliError::Usage("--kind needs --n and --dim".into()));
            };
            (generate(kind, n, dim, a.seed, a.ta_iters)?, format!("{kind}-{n}"))
        }
        (None, None) => return Err(CliError::Usage("give a point set file, --kind or --grid".into())),
    };
    let mut rows = vec![DiscrepancyReport::warnock(id.clone(), &set)];
    if a.mc_check {
        let mc = DiscrepancyReport::monte_carlo(id.clone(), &set, a.mc_samples, a.seed)?;
        let se = mc.mc_std_error.unwrap_or(0.0);
        let gap = (rows[0].value - mc.value).abs();
        eprintln!(
            "mc-check: |warnock - mc| = {gap:.3e}, 3 std errors = {:.3e}: {}",
            3.0 * se,
            if gap <= 3.0 * se { "agree" } else { "DISAGREE" }
        );
        rows.push(mc);
    }
    if a.linf {
        rows.push(DiscrepancyReport::linf(id, &set)?);
    }
    emit(a.out.as_deref(), &render_table(&rows))
}

fn optimize_subset(a: OptimizeSubset) -> Result<()> {
    let base = match (&a.base, a.base_size) {
        (Some(path), _) => load_point_set(path)?,
        (None, size) => {
            let dim = a
                .dim
                .ok_or_else(|| CliError::Usage("a generated base needs --dim".into()))?;
            sobol_set(size.unwrap_or(qmc_cmaes_cli::cells::ta_base_size(a.k)), dim)?
        }
    };
    let outcome = optimize(&base, a.k, a.iters, a.seed)?;
    eprintln!(
        "l2_star {:.6e} -> {:.6e} ({} of {} points)",
        outcome.start_l2,
        outcome.l2,
        a.k,
        base.len()
    );
    emit(a.out.as_deref(), &write_point_set(&outcome.subset))
}

fn run_one(a: RunCmd) -> Result<()> {
    let ctx = SetContext {
        master_seed: a.seed,
        ta_iters: a.ta_iters,
        import_dir: a.import_dir,
    };
    let cell = Cell {
        fid: a.fid,
        iid: a.iid,
        dim: a.dim,
        sampler: a.sampler,
        lambda: a.lambda,
        budget: a.budget.unwrap_or(DEFAULT_BUDGET_MULTIPLIER * a.dim as u64),
    };
    let sets = SetTable::build(&[a.sampler], &[a.dim], &ctx)?;
    let rf = cell.execute(&ctx, &sets, a.record_batches)?;
    eprintln!(
        "f{} i{} d{} {}: best precision {:e} after {} evaluations",
        a.fid,
        a.iid,
        a.dim,
        a.sampler,
        rf.record.trajectory.final_precision(),
        rf.record.evaluations
    );
    emit(a.out.as_deref(), &record::render(&rf))
}

fn experiment(a: ExperimentCmd) -> Result<()> {
    let mut spec = ExperimentSpec::load(&a.spec)?;
    if let Some(seed) = a.seed {
        spec.master_seed = seed;
    }
    let out = a
        .out
        .or_else(|| spec.output.clone())
        .ok_or_else(|| CliError::Usage("no output directory: pass --out or set `output` in the spec".into()))?;
    let summary = run_experiment(&spec, &out, a.jobs.max(1), a.quiet)?;
    for w in &summary.analysis.warnings {
        eprintln!("warning: {w}");
    }
    if !a.quiet {
        eprintln!(
            "{} runs executed, {} reused; results in {}",
            summary.ran,
            summary.skipped,
            out.display()
        );
    }
    Ok(())
}

fn analyze(a: AnalyzeCmd) -> Result<()> {
    let out = a.out.unwrap_or_else(|| a.dir.clone());
    let analysis = analyze_dir(&a.dir, &out, a.targets)?;
    for w in &analysis.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn lambda_study_cmd(a: LambdaStudyCmd) -> Result<()> {
    let study = LambdaStudy {
        kind: a.kind,
        dims: a.dims,
        ks: a.ks,
        lambdas: a.lambdas,
        fids: a.fids,
        instances: a.instances,
        budget_multiplier: a.budget_multiplier,
        master_seed: a.seed,
        ta_iters: a.ta_iters,
        n_targets: DEFAULT_TARGETS,
    };
    let rows = lambda_study::run_lambda_study(&study, a.jobs.max(1))?;
    emit(a.out.as_deref(), &lambda_study::render(&rows))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::GenPoints(a) => gen_points(a),
        Command::Discrepancy(a) => discrepancy(a),
        Command::OptimizeSubset(a) => optimize_subset(a),
        Command::Run(a) => run_one(a),
        Command::Experiment(a) => experiment(a),
        Command::Analyze(a) => analyze(a),
        Command::LambdaStudy(a) => lambda_study_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
