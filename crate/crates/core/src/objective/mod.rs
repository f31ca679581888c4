//! Composite objectives `f(x) = g(x) + γ‖x‖₁` and their subgradients.

mod partition;

pub use partition::{partition, Partition};

use std::fmt;
use std::io;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{norm1, Matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("dimension mismatch: objective has dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid objective parameter: {0}")]
    InvalidParameter(String),
    #[error("component {index}: q = {q} and q' = {q_prime} have opposite signs")]
    SignConflict { index: usize, q: f64, q_prime: f64 },
}

/// The smooth convex part `g` of a composite objective.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Short identifier used in instance dumps.
    fn kind(&self) -> &'static str {
        "opaque"
    }

    /// Writes the data defining `g` as dump blocks (see
    /// [`crate::problems::dump`]). Opaque functions write nothing.
    fn write_blocks(&self, _out: &mut dyn io::Write) -> io::Result<()> {
        Ok(())
    }

    /// `(M, b)` when `g(x) = ½xᵀMx + bᵀx` exactly.
    fn quadratic_form(&self) -> Option<(&Matrix, &[f64])> {
        None
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A smooth term given by a pair of closures.
pub struct FnSmooth {
    dim: usize,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
}

impl FnSmooth {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }
}

impl SmoothFunction for FnSmooth {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

/// `f(x) = g(x) + γ‖x‖₁` together with the Lipschitz constant `L` of `∇g`
/// and, when known, the strong-convexity modulus `μ` of `g`.
#[derive(Clone)]
pub struct CompositeObjective {
    smooth: Arc<dyn SmoothFunction>,
    gamma: f64,
    lipschitz: f64,
    mu: Option<f64>,
}

impl fmt::Debug for CompositeObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeObjective")
            .field("kind", &self.smooth.kind())
            .field("dim", &self.dim())
            .field("gamma", &self.gamma)
            .field("lipschitz", &self.lipschitz)
            .field("mu", &self.mu)
            .finish()
    }
}

impl CompositeObjective {
    pub fn new(
        smooth: Arc<dyn SmoothFunction>,
        gamma: f64,
        lipschitz: f64,
        mu: Option<f64>,
    ) -> Result<Self, ObjectiveError> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(ObjectiveError::InvalidParameter(format!("gamma = {gamma}")));
        }
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(ObjectiveError::InvalidParameter(format!(
                "lipschitz constant = {lipschitz}"
            )));
        }
        if let Some(mu) = mu {
            if !(mu > 0.0 && mu <= lipschitz) {
                return Err(ObjectiveError::InvalidParameter(format!(
                    "mu = {mu} must lie in (0, L = {lipschitz}]"
                )));
            }
        }
        Ok(Self {
            smooth,
            gamma,
            lipschitz,
            mu,
        })
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn smooth(&self) -> &dyn SmoothFunction {
        self.smooth.as_ref()
    }

    /// Same smooth term with a different ℓ1 weight.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self, ObjectiveError> {
        Self::new(self.smooth.clone(), gamma, self.lipschitz, self.mu)
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ObjectiveError> {
        if x.len() != self.dim() {
            return Err(ObjectiveError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `f(x) = g(x) + γ‖x‖₁`
    pub fn value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check_dim(x)?;
        Ok(self.smooth.value(x) + self.gamma * norm1(x))
    }

    pub fn smooth_value(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check_dim(x)?;
        Ok(self.smooth.value(x))
    }

    /// `∇g(x)`
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.check_dim(x)?;
        Ok(self.smooth.gradient(x))
    }

    /// The element of least Euclidean norm in `∂f(x)`. Evaluates `∇g`
    /// exactly once.
    pub fn min_norm_subgradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        let grad = self.gradient(x)?;
        Ok(min_norm_from_gradient(x, &grad, self.gamma))
    }

    /// The subgradient `∂̃f(q')` used by the momentum restart test, defined
    /// relative to the pair `(q, q')`. Requires `qᵢ·q'ᵢ ≥ 0` for every `i`.
    pub fn directional_subgradient(
        &self,
        q: &[f64],
        q_prime: &[f64],
    ) -> Result<Vec<f64>, ObjectiveError> {
        self.check_dim(q)?;
        self.check_dim(q_prime)?;
        let mut d = self.smooth.gradient(q_prime);
        for (i, di) in d.iter_mut().enumerate() {
            let (a, b) = (q[i], q_prime[i]);
            if a * b < 0.0 {
                return Err(ObjectiveError::SignConflict {
                    index: i,
                    q: a,
                    q_prime: b,
                });
            }
            if a > 0.0 || b > 0.0 {
                *di += self.gamma;
            } else if a < 0.0 || b < 0.0 {
                *di -= self.gamma;
            }
        }
        Ok(d)
    }
}

/// Componentwise minimal-norm subgradient given `∇g(x)`:
/// `∂ᵢg + γ·sign(xᵢ)` off zero, `sign(∂ᵢg)·max(|∂ᵢg| − γ, 0)` at zero.
pub fn min_norm_from_gradient(x: &[f64], grad: &[f64], gamma: f64) -> Vec<f64> {
    assert_eq!(
        x.len(),
        grad.len(),
        "min_norm_from_gradient: dimension mismatch"
    );
    x.iter()
        .zip(grad)
        .map(|(&xi, &gi)| {
            if xi > 0.0 {
                gi + gamma
            } else if xi < 0.0 {
                gi - gamma
            } else {
                let shrunk = gi.abs() - gamma;
                if shrunk > 0.0 {
                    gi.signum() * shrunk
                } else {
                    0.0
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn half_sq(dim: usize) -> Arc<dyn SmoothFunction> {
        Arc::new(FnSmooth::new(
            dim,
            |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            |x| x.to_vec(),
        ))
    }

    fn toy2d() -> CompositeObjective {
        let c = 0.85;
        let g = FnSmooth::new(
            2,
            move |x| {
                0.5 * (x[0] * x[0] + 2.0 * c * x[0] * x[1] + 1.5 * x[1] * x[1]) - 2.0 * x[0]
                    + (1.0 - c) * x[1]
            },
            move |x| vec![x[0] + c * x[1] - 2.0, c * x[0] + 1.5 * x[1] + 1.0 - c],
        );
        CompositeObjective::new(Arc::new(g), 1.0, 2.2, None).unwrap()
    }

    #[test]
    fn value_examples() {
        let zero = Arc::new(FnSmooth::new(2, |_| 0.0, |_| vec![0.0, 0.0]));
        let obj = CompositeObjective::new(zero, 1.0, 1.0, None).unwrap();
        assert_eq!(obj.value(&[3.0, -4.0]).unwrap(), 7.0);

        let obj = CompositeObjective::new(half_sq(2), 0.0, 1.0, Some(1.0)).unwrap();
        assert_eq!(obj.value(&[3.0, -4.0]).unwrap(), 12.5);

        assert_eq!(toy2d().value(&[1.0, 0.0]).unwrap(), -0.5);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let obj = toy2d();
        assert_eq!(
            obj.value(&[1.0]),
            Err(ObjectiveError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
        assert!(obj.min_norm_subgradient(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(CompositeObjective::new(half_sq(1), -1.0, 1.0, None).is_err());
        assert!(CompositeObjective::new(half_sq(1), 1.0, 0.0, None).is_err());
        assert!(CompositeObjective::new(half_sq(1), 1.0, 1.0, Some(2.0)).is_err());
    }

    #[test]
    fn min_norm_examples() {
        let obj = CompositeObjective::new(half_sq(1), 1.0, 1.0, Some(1.0)).unwrap();
        assert_eq!(obj.min_norm_subgradient(&[0.0]).unwrap(), vec![0.0]);

        let obj = toy2d();
        assert_eq!(
            obj.min_norm_subgradient(&[1.0, 0.0]).unwrap(),
            vec![0.0, 0.0]
        );

        let d = obj.min_norm_subgradient(&[0.95, 0.5]).unwrap();
        // ∇g(0.95, 0.5) = (0.95 + 0.425 − 2, 0.8075 + 0.75 + 0.15)
        assert!((d[0] - 0.375).abs() < 1e-14, "{d:?}");
        assert!((d[1] - 2.7075).abs() < 1e-14, "{d:?}");
    }

    #[test]
    fn min_norm_evaluates_gradient_once() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = calls.clone();
        let g = FnSmooth::new(
            3,
            |_| 0.0,
            move |x| {
                counter.fetch_add(1, Ordering::SeqCst);
                x.to_vec()
            },
        );
        let obj = CompositeObjective::new(Arc::new(g), 0.5, 1.0, None).unwrap();
        obj.min_norm_subgradient(&[1.0, 0.0, -2.0]).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn directional_examples() {
        let lin = Arc::new(FnSmooth::new(1, |x| x[0], |_| vec![1.0]));
        let obj = CompositeObjective::new(lin, 0.3, 1.0, None).unwrap();
        let d = obj.directional_subgradient(&[-1.0], &[-0.5]).unwrap();
        assert!((d[0] - 0.7).abs() < 1e-15);

        let obj = CompositeObjective::new(half_sq(2), 0.4, 1.0, None).unwrap();
        assert_eq!(
            obj.directional_subgradient(&[0.0, 0.0], &[0.0, 0.0])
                .unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            obj.directional_subgradient(&[1.0, 0.0], &[2.0, 0.0])
                .unwrap(),
            vec![2.4, 0.0]
        );
        // Mixed: q zero, q' positive and negative.
        assert_eq!(
            obj.directional_subgradient(&[0.0, 0.0], &[1.0, -1.0])
                .unwrap(),
            vec![1.4, -1.4]
        );
    }

    #[test]
    fn directional_rejects_sign_conflict() {
        let obj = CompositeObjective::new(half_sq(2), 0.4, 1.0, None).unwrap();
        assert!(matches!(
            obj.directional_subgradient(&[1.0, 0.0], &[-1.0, 0.0]),
            Err(ObjectiveError::SignConflict { index: 0, .. })
        ));
    }

    #[test]
    fn with_gamma_keeps_smooth_term() {
        let obj = toy2d().with_gamma(0.0).unwrap();
        assert_eq!(obj.value(&[1.0, 0.0]).unwrap(), -1.5);
    }
}
