//! Seeded generators for the benchmark problem families.
//!
//! Every generator is a pure function of its parameters and the [`Rng`]
//! it is handed; the order in which random quantities are drawn is part of
//! each generator's documented contract.

pub mod dump;
mod functions;
mod generators;

pub use functions::{sigmoid, softplus, LeastSquares, LogSumExp, Logistic, Quadratic};
pub use generators::{
    make_2d, make_lasso, make_logistic, make_logsumexp, make_quadratic,
    make_quadratic_with_spectrum, perturb_2d, TOY2D_C, TOY2D_GAMMA, TOY2D_X0,
};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numerics::{NumericsError, Rng};
use crate::objective::{CompositeObjective, ObjectiveError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed instance dump: {0}")]
    Dump(String),
}

/// A generated objective with its starting point and, when known in closed
/// form, the optimal value.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub label: String,
    pub seed: Option<u64>,
    pub objective: CompositeObjective,
    pub x0: Vec<f64>,
    pub f_ref: Option<f64>,
    pub minimizer: Option<Vec<f64>>,
}

impl ProblemInstance {
    /// Strong-convexity modulus of `g`, when the construction fixes it.
    pub fn mu_known(&self) -> Option<f64> {
        self.objective.mu()
    }

    /// Replaces `γ`. Closed-form optima are dropped unless `γ` is unchanged.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self, ProblemError> {
        if gamma != self.objective.gamma() {
            self.objective = self.objective.with_gamma(gamma)?;
            self.f_ref = None;
            self.minimizer = None;
        }
        Ok(self)
    }
}

/// A problem family together with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    Quadratic { n: usize },
    Lasso { m: usize, n: usize },
    Logistic { m: usize, n: usize },
    LogSumExp { k: usize, n: usize, r: f64 },
    Toy2d,
    Toy2dPerturbed,
}

/// Family names accepted on the command line.
pub const FAMILY_NAMES: [&str; 6] = [
    "quadratic",
    "lasso",
    "logistic",
    "logsumexp",
    "toy2d",
    "toy2d-perturbed",
];

/// Optional size overrides; `None` selects the family default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SizeOverrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<f64>,
}

impl ProblemSpec {
    /// Builds a spec from a family name, filling unspecified sizes with the
    /// full-scale defaults (quadratic n=1000; lasso 500×1000; logistic
    /// 500×100; logsumexp 500×200 with r=5).
    pub fn from_family(name: &str, sizes: SizeOverrides) -> Result<Self, ProblemError> {
        let spec = match name {
            "quadratic" => ProblemSpec::Quadratic {
                n: sizes.n.unwrap_or(1000),
            },
            "lasso" => ProblemSpec::Lasso {
                m: sizes.m.unwrap_or(500),
                n: sizes.n.unwrap_or(1000),
            },
            "logistic" => ProblemSpec::Logistic {
                m: sizes.m.unwrap_or(500),
                n: sizes.n.unwrap_or(100),
            },
            "logsumexp" => ProblemSpec::LogSumExp {
                k: sizes.k.unwrap_or(500),
                n: sizes.n.unwrap_or(200),
                r: sizes.r.unwrap_or(5.0),
            },
            "toy2d" => ProblemSpec::Toy2d,
            "toy2d-perturbed" => ProblemSpec::Toy2dPerturbed,
            other => {
                return Err(ProblemError::InvalidParameter(format!(
                    "unknown problem family '{other}'"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::Lasso { .. } => "lasso",
            ProblemSpec::Logistic { .. } => "logistic",
            ProblemSpec::LogSumExp { .. } => "logsumexp",
            ProblemSpec::Toy2d => "toy2d",
            ProblemSpec::Toy2dPerturbed => "toy2d-perturbed",
        }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(ProblemError::InvalidParameter(format!(
                    "{name} must be at least 1"
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            ProblemSpec::Quadratic { n } => positive("n", n),
            ProblemSpec::Lasso { m, n } | ProblemSpec::Logistic { m, n } => {
                positive("m", m)?;
                positive("n", n)
            }
            ProblemSpec::LogSumExp { k, n, r } => {
                positive("k", k)?;
                positive("n", n)?;
                if r.is_finite() && r > 0.0 {
                    Ok(())
                } else {
                    Err(ProblemError::InvalidParameter(format!(
                        "r = {r} must be positive"
                    )))
                }
            }
            ProblemSpec::Toy2d | ProblemSpec::Toy2dPerturbed => Ok(()),
        }
    }

    /// Generates the instance for `seed`. The deterministic 2D example
    /// ignores the seed.
    pub fn generate(&self, seed: u64) -> Result<ProblemInstance, ProblemError> {
        self.validate()?;
        let mut rng = Rng::new(seed);
        let mut inst = match *self {
            ProblemSpec::Quadratic { n } => make_quadratic(n, &mut rng)?,
            ProblemSpec::Lasso { m, n } => make_lasso(m, n, &mut rng)?,
            ProblemSpec::Logistic { m, n } => make_logistic(m, n, &mut rng)?,
            ProblemSpec::LogSumExp { k, n, r } => make_logsumexp(k, n, r, &mut rng)?,
            ProblemSpec::Toy2d => make_2d(TOY2D_C, TOY2D_GAMMA, &TOY2D_X0)?,
            ProblemSpec::Toy2dPerturbed => perturb_2d(&mut rng)?,
        };
        inst.seed = match self {
            ProblemSpec::Toy2d => None,
            _ => Some(seed),
        };
        Ok(inst)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Quadratic { n } => write!(f, "quadratic(n={n})"),
            ProblemSpec::Lasso { m, n } => write!(f, "lasso(m={m},n={n})"),
            ProblemSpec::Logistic { m, n } => write!(f, "logistic(m={m},n={n})"),
            ProblemSpec::LogSumExp { k, n, r } => write!(f, "logsumexp(k={k},n={n},r={r})"),
            ProblemSpec::Toy2d => f.write_str("toy2d"),
            ProblemSpec::Toy2dPerturbed => f.write_str("toy2d-perturbed"),
        }
    }
}

impl FromStr for ProblemSpec {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemSpec::from_family(s, SizeOverrides::default())
    }
}
