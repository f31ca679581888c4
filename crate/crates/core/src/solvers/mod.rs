//! Iterative methods for `min g(x) + γ‖x‖₁`.
//!
//! * [`alg1_step`]: constant-step subgradient method along the minimal-norm
//!   subgradient, with explicit handling of components that cross zero.
//! * [`alg2_step`]: the accelerated conservative variant. Each iteration
//!   runs the same subgradient phase, then a momentum phase that is
//!   discarded whenever it would increase the objective to first order.
//! * [`ista_step`], [`fista_restart_step`]: proximal-gradient baselines.
//! * [`classic_subgrad_step`]: plain subgradient descent with `h_k = s·k^(−e)`.
//!
//! [`run`] drives any of them and records an [`IterationTrace`].

mod alg1;
mod alg2;
mod classic;
mod driver;
mod proximal;

pub use alg1::{alg1_step, subgradient_phase, Crossing, SubgradientPhase};
pub use alg2::{alg2_step, Alg2Step};
pub use classic::{classic_normalized_step, classic_step_size, classic_subgrad_step};
pub use driver::{run, IterationTrace, TraceRecord};
pub use proximal::{fista_restart_step, ista_step, soft_threshold, FistaState};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::objective::{CompositeObjective, ObjectiveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error("non-finite value in {stage}")]
    NonFinite { stage: &'static str },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration {k}: {source}")]
    AtIteration {
        k: usize,
        #[source]
        source: Box<SolverError>,
    },
}

pub(crate) fn ensure_finite(v: &[f64], stage: &'static str) -> Result<(), SolverError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SolverError::NonFinite { stage })
    }
}

pub(crate) fn check_step(h: f64) -> Result<(), SolverError> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(SolverError::InvalidConfig(format!("step size {h}")))
    }
}

/// The methods compared by the benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Alg1,
    Alg2,
    Ista,
    FistaRestart,
    ClassicSubgrad,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Alg1,
        Method::Alg2,
        Method::Ista,
        Method::FistaRestart,
        Method::ClassicSubgrad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Alg1 => "alg1",
            Method::Alg2 => "alg2",
            Method::Ista => "ista",
            Method::FistaRestart => "fista",
            Method::ClassicSubgrad => "classic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown solver '{s}' (expected alg1, alg2, ista, fista or classic)")
            })
    }
}

/// Constant step size: `Auto` resolves to `1/L`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StepSize {
    #[default]
    Auto,
    Fixed(f64),
}

impl StepSize {
    pub fn resolve(self, obj: &CompositeObjective) -> f64 {
        match self {
            StepSize::Auto => 1.0 / obj.lipschitz(),
            StepSize::Fixed(h) => h,
        }
    }
}

impl fmt::Display for StepSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSize::Auto => f.write_str("auto"),
            StepSize::Fixed(h) => write!(f, "{h:e}"),
        }
    }
}

impl FromStr for StepSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(StepSize::Auto);
        }
        match s.parse::<f64>() {
            Ok(h) if h.is_finite() && h > 0.0 => Ok(StepSize::Fixed(h)),
            _ => Err(format!(
                "step must be 'auto' or a positive number, got '{s}'"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub step: StepSize,
    pub max_iter: usize,
    /// `s` in the classical schedule `h_k = s·k^(−e)`.
    pub classic_step_scale: f64,
    /// `e` in the classical schedule.
    pub classic_step_exponent: f64,
    /// Use `h_k` as a step length along `∂⁻f/‖∂⁻f‖` instead of as a step
    /// size.
    pub classic_normalized: bool,
}

impl SolverConfig {
    pub fn new(method: Method, max_iter: usize) -> Self {
        Self {
            method,
            step: StepSize::Auto,
            max_iter,
            classic_step_scale: 10.0,
            classic_step_exponent: 0.25,
            classic_normalized: false,
        }
    }

    pub fn with_step(mut self, step: StepSize) -> Self {
        self.step = step;
        self
    }

    pub fn with_classic_schedule(mut self, scale: f64, exponent: f64) -> Self {
        self.classic_step_scale = scale;
        self.classic_step_exponent = exponent;
        self
    }

    pub fn with_classic_normalized(mut self, normalized: bool) -> Self {
        self.classic_normalized = normalized;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if let StepSize::Fixed(h) = self.step {
            check_step(h)?;
        }
        if !(self.classic_step_scale.is_finite() && self.classic_step_scale > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "classic step scale {}",
                self.classic_step_scale
            )));
        }
        if !self.classic_step_exponent.is_finite() {
            return Err(SolverError::InvalidConfig(format!(
                "classic step exponent {}",
                self.classic_step_exponent
            )));
        }
        Ok(())
    }
}

/// Iterate, momentum (zero except for [`alg2_step`]), iteration counter and
/// cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub k: usize,
    pub f_x: f64,
}

impl SolverState {
    pub fn new(obj: &CompositeObjective, x0: &[f64]) -> Result<Self, SolverError> {
        let f_x = obj.value(x0)?;
        ensure_finite(x0, "initial point")?;
        Ok(Self {
            x: x0.to_vec(),
            p: vec![0.0; x0.len()],
            k: 0,
            f_x,
        })
    }
}
