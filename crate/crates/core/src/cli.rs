//! Command-line front end: `solve`, `bench` and `verify`.
//!
//! Exit codes: 0 success, 1 numerical or property failure, 2 usage error.
//! `--config <path>` reads `key=value` lines (keys are long flag names
//! without dashes); flags given on the command line take precedence.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::bench::{
    run_experiment, run_trial, write_trace_rows, ExperimentConfig, ReferencePolicy, RAW_HEADER,
};
use crate::numerics::norm2;
use crate::problems::{dump::write_instance, ProblemSpec, SizeOverrides};
use crate::solvers::{Method, StepSize};
use crate::verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "l1subgrad",
    version,
    about = "Constant-step subgradient methods for l1-composite problems",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one generated instance and write its per-iteration trace.
    Solve(SolveArgs),
    /// Average gap curves of several solvers over seeded trials.
    Bench(BenchArgs),
    /// Run property suites and report pass/fail with measured margins.
    Verify(VerifyArgs),
}

/// Problem-family sizes and overrides shared by `solve` and `bench`.
#[derive(Debug, Args, Clone)]
pub struct ProblemArgs {
    /// Dimension n [family default: quadratic 1000, lasso 1000, logistic 100, logsumexp 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Rows m for lasso/logistic [default: 500]
    #[arg(long)]
    pub m: Option<usize>,
    /// Rows k for logsumexp [default: 500]
    #[arg(long)]
    pub k: Option<usize>,
    /// Smoothing r for logsumexp [default: 5]
    #[arg(long)]
    pub r: Option<f64>,
    /// Override the generator's l1 weight [default: family rule]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Iterations [default: 2000, or 500 for toy2d]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Seed (solve) or base seed, trial t using seed+t (bench)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Constant step: "auto" (1/L) or a positive number
    #[arg(long, default_value = "auto")]
    pub step: StepSize,
    /// Classical baseline schedule scale s in s*k^(-e) [default: 10, or 1 for toy2d]
    #[arg(long)]
    pub classic_scale: Option<f64>,
    /// Classical baseline schedule exponent e [default: 0.25, or 1 for toy2d]
    #[arg(long)]
    pub classic_exponent: Option<f64>,
    /// Use the schedule as a step length along the normalized subgradient
    /// [default: true, false for toy2d]
    #[arg(long)]
    pub classic_normalized: Option<bool>,
    /// Reference optimum: auto, analytic or long-run
    #[arg(long, default_value = "auto")]
    pub reference: ReferencePolicy,
    /// Read further flags from a key=value file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// quadratic, lasso, logistic, logsumexp, toy2d or toy2d-perturbed
    #[arg(long)]
    pub problem: String,
    /// alg1, alg2, ista, fista or classic
    #[arg(long)]
    pub solver: Method,
    #[command(flatten)]
    pub common: ProblemArgs,
    /// Per-iteration CSV output
    #[arg(long, default_value = "solve.csv")]
    pub out: PathBuf,
    /// Also write the generated instance in the plain-text dump format
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// quadratic, lasso, logistic, logsumexp, toy2d or toy2d-perturbed
    #[arg(long)]
    pub experiment: String,
    /// Number of seeded trials
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Comma-separated solver list
    #[arg(
        long,
        default_value = "alg1,alg2,ista,fista,classic",
        value_delimiter = ','
    )]
    pub solvers: Vec<Method>,
    #[command(flatten)]
    pub common: ProblemArgs,
    /// Worker threads for trials (output does not depend on it)
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Aggregated CSV; raw rows go to <stem>.raw.csv and metadata to <stem>.meta
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// rate, dominance, subgrad-oracle, pl, oscillation, gradients or all
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    /// First instance seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Splices `--config` file contents in front of the command-line flags so
/// that explicit flags override file values.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("--config {path}: {e}"))?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", i + 1))?;
        let key = key.trim();
        if key == "config" {
            return Err(format!(
                "{path}:{}: nested config files are not supported",
                i + 1
            ));
        }
        extra.push(format!("--{key}"));
        extra.push(value.trim().to_string());
    }
    // Subcommand name sits at index 1; file flags go right after it.
    let mut out: Vec<String> = args[..2.min(args.len())].to_vec();
    out.extend(extra);
    out.extend(args[2.min(args.len())..].iter().cloned());
    Ok(out)
}

fn usage_error(msg: impl std::fmt::Display) -> i32 {
    let err = Cli::command().error(ErrorKind::InvalidValue, msg);
    let _ = err.print();
    2
}

fn failure(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    1
}

fn experiment_config(
    family: &str,
    common: &ProblemArgs,
    solvers: Vec<Method>,
    trials: usize,
    jobs: usize,
) -> Result<ExperimentConfig, String> {
    let sizes = SizeOverrides {
        n: common.n,
        m: common.m,
        k: common.k,
        r: common.r,
    };
    let spec = ProblemSpec::from_family(family, sizes).map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig::new(spec);
    cfg.gamma = common.gamma;
    cfg.solvers = solvers;
    cfg.trials = trials;
    cfg.jobs = jobs;
    cfg.base_seed = common.seed;
    cfg.step = common.step;
    cfg.reference = common.reference;
    if let Some(it) = common.iters {
        cfg.max_iter = it;
    }
    if let Some(s) = common.classic_scale {
        cfg.classic_step_scale = s;
    }
    if let Some(e) = common.classic_exponent {
        cfg.classic_step_exponent = e;
    }
    if let Some(b) = common.classic_normalized {
        cfg.classic_normalized = b;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn create(path: &Path) -> io::Result<io::BufWriter<fs::File>> {
    Ok(io::BufWriter::new(fs::File::create(path)?))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> i32 {
    let cfg = match experiment_config(&args.problem, &args.common, vec![args.solver], 1, 1) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let inst = match cfg.instance(0) {
        Ok(i) => i,
        Err(e) => return failure(e),
    };
    if let Some(path) = &args.dump {
        let written = create(path).and_then(|mut w| {
            write_instance(&mut w, &inst)?;
            w.flush()
        });
        if let Err(e) = written {
            return failure(format!("{}: {e}", path.display()));
        }
    }
    let trial = match run_trial(&cfg, 0) {
        Ok(t) => t,
        Err(e) => return failure(e),
    };
    let trace = &trial.traces[0];
    let written = create(&args.out).and_then(|mut w| {
        writeln!(w, "{RAW_HEADER}")?;
        write_trace_rows(
            &mut w,
            cfg.experiment_name(),
            0,
            trial.reference.certified,
            trace,
        )?;
        w.flush()
    });
    if let Err(e) = written {
        return failure(format!("{}: {e}", args.out.display()));
    }
    let subgrad = match inst.objective.min_norm_subgradient(&trace.final_x) {
        Ok(d) => norm2(&d),
        Err(e) => return failure(e),
    };
    let rf = trial.reference;
    let status = if rf.analytic {
        "analytic"
    } else if rf.certified {
        "certified"
    } else {
        "uncertified"
    };
    let _ = writeln!(out, "problem        {} seed={}", cfg.problem, cfg.base_seed);
    let _ = writeln!(
        out,
        "solver         {} step={}",
        args.solver,
        trace
            .step
            .map_or_else(|| "schedule".into(), |h| format!("{h:e}"))
    );
    let _ = writeln!(out, "iterations     {}", cfg.max_iter);
    let _ = writeln!(out, "final f        {:e}", trace.final_value());
    let _ = writeln!(out, "final |d-f|_2  {subgrad:e}");
    let _ = writeln!(out, "reference f*   {:e} ({status})", rf.value);
    let _ = writeln!(
        out,
        "final gap      {:e}",
        trace.final_gap().unwrap_or(f64::NAN)
    );
    let _ = writeln!(out, "trace          {}", args.out.display());
    0
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> i32 {
    let cfg = match experiment_config(
        &args.experiment,
        &args.common,
        args.solvers.clone(),
        args.trials,
        args.jobs,
    ) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let result = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let raw_path = sibling(&args.out, ".raw.csv");
    let meta_path = sibling(&args.out, ".meta");
    let written = create(&args.out)
        .and_then(|mut w| {
            result.write_aggregate_csv(&mut w)?;
            w.flush()
        })
        .and_then(|_| create(&raw_path))
        .and_then(|mut w| {
            result.write_raw_csv(&mut w)?;
            w.flush()
        })
        .and_then(|_| create(&meta_path))
        .and_then(|mut w| {
            result.write_meta(&mut w)?;
            w.flush()
        });
    if let Err(e) = written {
        return failure(e);
    }
    let _ = writeln!(
        out,
        "{} trials={} completed={} iters={}",
        cfg.problem,
        cfg.trials,
        result.trials.len(),
        cfg.max_iter
    );
    let _ = write!(out, "{}", result.summary());
    let _ = writeln!(
        out,
        "wrote {}, {}, {}",
        args.out.display(),
        raw_path.display(),
        meta_path.display()
    );
    0
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> i32 {
    let results = match run_suite(args.suite, args.seed) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let mut failed = 0;
    for r in &results {
        let _ = writeln!(out, "{r}");
        if !r.passed {
            failed += 1;
        }
    }
    let _ = writeln!(out, "{} properties, {failed} failed", results.len());
    i32::from(failed > 0)
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing the summary to `out`. Returns the process exit code.
pub fn run_cli(args: Vec<String>, out: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return usage_error(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Verify(a) => verify(a, out),
    }
}
