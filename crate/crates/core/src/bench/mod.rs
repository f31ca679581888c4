//! Multi-trial experiments: per-trial reference optima, gap curves averaged
//! over trials and deterministic CSV output.

mod reference;

pub use reference::{long_run_reference, reference_optimum, ReferenceOptions, ReferenceValue};

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::problems::{ProblemError, ProblemInstance, ProblemSpec};
use crate::solvers::{run, IterationTrace, Method, SolverConfig, SolverError, StepSize};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{method}: {source}")]
    SolverFailed {
        method: Method,
        #[source]
        source: SolverError,
    },
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("{failed} of {trials} trials aborted (limit 5%); first failure: {first}")]
    TooManyFailures {
        failed: usize,
        trials: usize,
        first: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Where the per-trial optimal value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferencePolicy {
    /// Analytic value when the instance has one, long-run solve otherwise.
    #[default]
    Auto,
    /// Analytic value only; instances without one abort the trial.
    Analytic,
    /// Always solve numerically, ignoring analytic values.
    LongRun,
}

impl fmt::Display for ReferencePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferencePolicy::Auto => "auto",
            ReferencePolicy::Analytic => "analytic",
            ReferencePolicy::LongRun => "long-run",
        })
    }
}

impl FromStr for ReferencePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(ReferencePolicy::Auto),
            "analytic" => Ok(ReferencePolicy::Analytic),
            "long-run" => Ok(ReferencePolicy::LongRun),
            _ => Err(format!("unknown reference policy '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    /// Overrides the generator's `γ`.
    pub gamma: Option<f64>,
    /// Solvers in output order.
    pub solvers: Vec<Method>,
    pub trials: usize,
    pub max_iter: usize,
    /// Trial `t` uses seed `base_seed + t`.
    pub base_seed: u64,
    pub step: StepSize,
    pub classic_step_scale: f64,
    pub classic_step_exponent: f64,
    /// Classical baseline in step-length form, see
    /// [`crate::solvers::classic_normalized_step`].
    pub classic_normalized: bool,
    pub reference: ReferencePolicy,
    pub reference_opts: ReferenceOptions,
    /// Worker threads; does not affect any output.
    pub jobs: usize,
}

impl ExperimentConfig {
    /// Defaults: every solver, one trial, seed 0, `h = 1/L`; 500 iterations
    /// and the step size `h_k = 1/k` for the 2D example, 2000 iterations and
    /// the step length `ν_k = 10k^(−1/4)` otherwise. (With curvature up to
    /// 100, a step *size* of `10k^(−1/4)` diverges for any practical `k`.)
    pub fn new(problem: ProblemSpec) -> Self {
        let toy = matches!(problem, ProblemSpec::Toy2d | ProblemSpec::Toy2dPerturbed);
        let (max_iter, scale, exponent) = if toy {
            (500, 1.0, 1.0)
        } else {
            (2000, 10.0, 0.25)
        };
        Self {
            problem,
            gamma: None,
            solvers: Method::ALL.to_vec(),
            trials: 1,
            max_iter,
            base_seed: 0,
            step: StepSize::Auto,
            classic_step_scale: scale,
            classic_step_exponent: exponent,
            classic_normalized: !toy,
            reference: ReferencePolicy::Auto,
            reference_opts: ReferenceOptions::default(),
            jobs: 1,
        }
    }

    pub fn experiment_name(&self) -> &'static str {
        self.problem.family()
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn solver_config(&self, method: Method) -> SolverConfig {
        SolverConfig::new(method, self.max_iter)
            .with_step(self.step)
            .with_classic_schedule(self.classic_step_scale, self.classic_step_exponent)
            .with_classic_normalized(self.classic_normalized)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.problem.validate()?;
        if self.trials == 0 {
            return Err(BenchError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(BenchError::InvalidConfig("no solvers selected".into()));
        }
        if self.jobs == 0 {
            return Err(BenchError::InvalidConfig("jobs must be at least 1".into()));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return Err(BenchError::InvalidConfig(format!("gamma = {g}")));
            }
        }
        for m in &self.solvers {
            self.solver_config(*m).validate()?;
        }
        Ok(())
    }

    /// Generates the instance of trial `t`, with the `γ` override applied.
    pub fn instance(&self, trial: usize) -> Result<ProblemInstance, ProblemError> {
        let inst = self.problem.generate(self.trial_seed(trial))?;
        match self.gamma {
            Some(g) => inst.with_gamma(g),
            None => Ok(inst),
        }
    }

    /// Key=value description of every field, in a fixed order.
    pub fn write_meta(&self, out: &mut dyn Write) -> io::Result<()> {
        let solvers: Vec<&str> = self.solvers.iter().map(|m| m.name()).collect();
        writeln!(out, "experiment={}", self.experiment_name())?;
        writeln!(out, "problem={}", self.problem)?;
        writeln!(
            out,
            "gamma={}",
            self.gamma
                .map_or_else(|| "default".into(), |g| format!("{g:e}"))
        )?;
        writeln!(out, "solvers={}", solvers.join(","))?;
        writeln!(out, "trials={}", self.trials)?;
        writeln!(out, "max_iter={}", self.max_iter)?;
        writeln!(out, "base_seed={}", self.base_seed)?;
        writeln!(out, "seed_policy=base_seed+trial")?;
        writeln!(out, "step={}", self.step)?;
        writeln!(out, "classic_step_scale={:e}", self.classic_step_scale)?;
        writeln!(
            out,
            "classic_step_exponent={:e}",
            self.classic_step_exponent
        )?;
        writeln!(out, "classic_normalized={}", self.classic_normalized)?;
        writeln!(out, "reference={}", self.reference)?;
        writeln!(
            out,
            "reference_fista_budget={}",
            self.reference_opts.fista_budget
        )?;
        writeln!(
            out,
            "reference_polish_cap={}",
            self.reference_opts.polish_cap
        )?;
        writeln!(out, "reference_tol={:e}", self.reference_opts.tol)?;
        writeln!(out, "jobs={}", self.jobs)?;
        writeln!(out, "version={}", env!("CARGO_PKG_VERSION"))
    }
}

/// Reference value and one trace per solver for a single trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub reference: ReferenceValue,
    /// In the order of [`ExperimentConfig::solvers`].
    pub traces: Vec<IterationTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub reason: String,
}

/// Pointwise mean gap over the completed trials.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    pub solver: Method,
    pub mean_gap: Vec<f64>,
    pub trials: usize,
}

impl GapCurve {
    pub fn final_mean_gap(&self) -> f64 {
        self.mean_gap.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
    pub curves: Vec<GapCurve>,
}

/// Reference and traces for trial `t`.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialResult, BenchError> {
    let inst = cfg.instance(trial)?;
    let reference = match cfg.reference {
        ReferencePolicy::Auto => reference_optimum(&inst, &cfg.reference_opts)?,
        ReferencePolicy::LongRun => long_run_reference(&inst, &cfg.reference_opts)?,
        ReferencePolicy::Analytic => {
            if inst.f_ref.is_none() {
                return Err(BenchError::InvalidConfig(format!(
                    "{} has no analytic optimum",
                    inst.label
                )));
            }
            reference_optimum(&inst, &cfg.reference_opts)?
        }
    };
    let traces = cfg
        .solvers
        .iter()
        .map(|m| {
            run(
                &inst.objective,
                &inst.x0,
                &cfg.solver_config(*m),
                Some(reference.value),
            )
            .map_err(|source| BenchError::SolverFailed { method: *m, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrialResult {
        trial,
        seed: cfg.trial_seed(trial),
        reference,
        traces,
    })
}

/// Runs every trial (on up to `cfg.jobs` threads) and averages the gaps.
/// Results do not depend on `jobs` or on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, BenchError> {
    cfg.validate()?;
    let slots: Mutex<Vec<Option<Result<TrialResult, String>>>> =
        Mutex::new((0..cfg.trials).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = cfg.jobs.min(cfg.trials);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                if t >= cfg.trials {
                    break;
                }
                let outcome = run_trial(cfg, t).map_err(|e| e.to_string());
                slots.lock().expect("trial slot lock")[t] = Some(outcome);
            });
        }
    });

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, slot) in slots
        .into_inner()
        .expect("trial slot lock")
        .into_iter()
        .enumerate()
    {
        match slot.expect("every trial index is claimed") {
            Ok(r) => trials.push(r),
            Err(reason) => {
                log::error!("trial {t} (seed {}) aborted: {reason}", cfg.trial_seed(t));
                failures.push(TrialFailure { trial: t, reason });
            }
        }
    }
    // More than 5% of trials failed.
    if failures.len() * 20 > cfg.trials {
        return Err(BenchError::TooManyFailures {
            failed: failures.len(),
            trials: cfg.trials,
            first: failures[0].reason.clone(),
        });
    }

    let curves = cfg
        .solvers
        .iter()
        .enumerate()
        .map(|(s, &solver)| {
            let mut sum = vec![0.0; cfg.max_iter + 1];
            for tr in &trials {
                for (acc, rec) in sum.iter_mut().zip(&tr.traces[s].records) {
                    *acc += rec.gap.expect("traces carry the reference");
                }
            }
            let n = trials.len() as f64;
            GapCurve {
                solver,
                mean_gap: sum.into_iter().map(|v| v / n).collect(),
                trials: trials.len(),
            }
        })
        .collect();

    Ok(ExperimentResult {
        config: cfg.clone(),
        trials,
        failures,
        curves,
    })
}

pub const RAW_HEADER: &str = "experiment,solver,trial,iter,f_value,gap,certified";
pub const AGGREGATE_HEADER: &str = "experiment,solver,iter,mean_gap,trials";

/// Raw rows of one trace, without header.
pub fn write_trace_rows(
    out: &mut dyn Write,
    experiment: &str,
    trial: usize,
    certified: bool,
    trace: &IterationTrace,
) -> io::Result<()> {
    for rec in &trace.records {
        let gap = rec
            .gap
            .map_or_else(|| "nan".to_string(), |g| format!("{g:e}"));
        writeln!(
            out,
            "{experiment},{},{trial},{},{:e},{gap},{certified}",
            trace.method, rec.k, rec.f_value
        )?;
    }
    Ok(())
}

impl ExperimentResult {
    /// Per-trial rows sorted by solver (configuration order), trial, iteration.
    pub fn write_raw_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{RAW_HEADER}")?;
        let name = self.config.experiment_name();
        for s in 0..self.config.solvers.len() {
            for tr in &self.trials {
                write_trace_rows(out, name, tr.trial, tr.reference.certified, &tr.traces[s])?;
            }
        }
        Ok(())
    }

    pub fn write_aggregate_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{AGGREGATE_HEADER}")?;
        let name = self.config.experiment_name();
        for c in &self.curves {
            for (k, g) in c.mean_gap.iter().enumerate() {
                writeln!(out, "{name},{},{k},{g:e},{}", c.solver, c.trials)?;
            }
        }
        Ok(())
    }

    /// Configuration plus run outcome, key=value.
    pub fn write_meta(&self, out: &mut dyn Write) -> io::Result<()> {
        self.config.write_meta(out)?;
        writeln!(out, "completed_trials={}", self.trials.len())?;
        let aborted: Vec<String> = self.failures.iter().map(|f| f.trial.to_string()).collect();
        writeln!(out, "aborted_trials={}", aborted.join(","))?;
        let uncertified = self
            .trials
            .iter()
            .filter(|t| !t.reference.certified)
            .count();
        writeln!(out, "uncertified_references={uncertified}")
    }

    pub fn curve(&self, solver: Method) -> Option<&GapCurve> {
        self.curves.iter().find(|c| c.solver == solver)
    }

    /// Final mean gap per solver as an aligned text table.
    pub fn summary(&self) -> String {
        let mut s = format!("{:<8} {:>14}\n", "solver", "final_mean_gap");
        for c in &self.curves {
            s.push_str(&format!(
                "{:<8} {:>14.6e}\n",
                c.solver.name(),
                c.final_mean_gap()
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(r: &ExperimentResult) -> (String, String, String) {
        let mut raw = Vec::new();
        let mut agg = Vec::new();
        let mut meta = Vec::new();
        r.write_raw_csv(&mut raw).unwrap();
        r.write_aggregate_csv(&mut agg).unwrap();
        r.write_meta(&mut meta).unwrap();
        (
            String::from_utf8(raw).unwrap(),
            String::from_utf8(agg).unwrap(),
            String::from_utf8(meta).unwrap(),
        )
    }

    #[test]
    fn zero_iterations_give_initial_gap() {
        let mut cfg = ExperimentConfig::new(ProblemSpec::Toy2d);
        cfg.max_iter = 0;
        let r = run_experiment(&cfg).unwrap();
        let (raw, agg, _) = csv(&r);
        let f0 = cfg
            .instance(0)
            .unwrap()
            .objective
            .value(&[0.95, 0.5])
            .unwrap();
        assert_eq!(raw.lines().count(), 1 + Method::ALL.len());
        assert_eq!(agg.lines().count(), 1 + Method::ALL.len());
        for c in &r.curves {
            assert_eq!(c.mean_gap, vec![f0 + 0.5]);
        }
        assert!(raw.lines().nth(1).unwrap().starts_with("toy2d,alg1,0,0,"));
    }

    #[test]
    fn deterministic_across_job_counts() {
        let mut cfg = ExperimentConfig::new(ProblemSpec::Quadratic { n: 8 });
        cfg.trials = 6;
        cfg.max_iter = 30;
        cfg.base_seed = 11;
        let a = csv(&run_experiment(&cfg).unwrap());
        cfg.jobs = 4;
        let b = csv(&run_experiment(&cfg).unwrap());
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        assert_ne!(a.2, b.2, "jobs is recorded in the metadata");
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = ExperimentConfig::new(ProblemSpec::Toy2d);
        cfg.trials = 0;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = ExperimentConfig::new(ProblemSpec::Toy2d);
        cfg.solvers.clear();
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = ExperimentConfig::new(ProblemSpec::Toy2dPerturbed);
        cfg.reference = ReferencePolicy::Analytic;
        let err = run_experiment(&cfg).unwrap_err();
        assert!(
            matches!(err, BenchError::TooManyFailures { failed: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn long_run_policy_on_toy2d() {
        let mut cfg = ExperimentConfig::new(ProblemSpec::Toy2d);
        cfg.reference = ReferencePolicy::LongRun;
        cfg.solvers = vec![Method::Alg1];
        cfg.max_iter = 50;
        let r = run_experiment(&cfg).unwrap();
        let rf = r.trials[0].reference;
        assert!(!rf.analytic && rf.certified);
        assert!((rf.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn gaps_nonnegative_with_certified_reference() {
        let mut cfg = ExperimentConfig::new(ProblemSpec::Logistic { m: 40, n: 10 });
        cfg.trials = 3;
        cfg.max_iter = 200;
        let r = run_experiment(&cfg).unwrap();
        for tr in &r.trials {
            assert!(tr.reference.certified);
            for t in &tr.traces {
                assert!(t.records.iter().all(|rec| rec.gap.unwrap() >= -1e-9));
            }
        }
        assert!(r.summary().contains("alg2"));
    }
}
