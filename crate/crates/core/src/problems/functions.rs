//! Smooth terms used by the generators.

use std::io;

use super::dump::{write_matrix_block, write_scalar, write_vector_block};
use crate::numerics::{dot, Matrix};
use crate::objective::SmoothFunction;

/// `g(x) = ½xᵀMx + bᵀx` with `M` symmetric.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub m: Matrix,
    pub b: Vec<f64>,
}

impl SmoothFunction for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.m.matvec(x)) + dot(&self.b, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.m.matvec(x);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi;
        }
        g
    }

    fn kind(&self) -> &'static str {
        "quadratic"
    }

    fn write_blocks(&self, out: &mut dyn io::Write) -> io::Result<()> {
        write_matrix_block(out, "M", &self.m)?;
        write_vector_block(out, "b", &self.b)
    }

    fn quadratic_form(&self) -> Option<(&Matrix, &[f64])> {
        Some((&self.m, &self.b))
    }
}

/// `g(x) = ½‖Ax − b‖₂²`
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl LeastSquares {
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }
}

impl SmoothFunction for LeastSquares {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        0.5 * dot(&r, &r)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.a.tr_matvec(&self.residual(x))
    }

    fn kind(&self) -> &'static str {
        "least_squares"
    }

    fn write_blocks(&self, out: &mut dyn io::Write) -> io::Result<()> {
        write_matrix_block(out, "A", &self.a)?;
        write_vector_block(out, "b", &self.b)
    }
}

/// `log(1 + eᵘ)` without overflow.
pub fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// `1 / (1 + e⁻ᵘ)` without overflow.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Logistic negative log-likelihood
/// `g(x) = Σᵢ (1 − bᵢ)⟨Mᵢ, x⟩ + log(1 + exp(−⟨Mᵢ, x⟩))` with labels `bᵢ ∈ {0, 1}`.
#[derive(Debug, Clone)]
pub struct Logistic {
    pub m: Matrix,
    pub labels: Vec<f64>,
}

impl SmoothFunction for Logistic {
    fn dim(&self) -> usize {
        self.m.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.m
            .matvec(x)
            .iter()
            .zip(&self.labels)
            .map(|(t, b)| (1.0 - b) * t + softplus(-t))
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        // d/dt [(1 − b)t + log(1 + e⁻ᵗ)] = (1 − b) − σ(−t)
        let w: Vec<f64> = self
            .m
            .matvec(x)
            .iter()
            .zip(&self.labels)
            .map(|(t, b)| (1.0 - b) - sigmoid(-t))
            .collect();
        self.m.tr_matvec(&w)
    }

    fn kind(&self) -> &'static str {
        "logistic"
    }

    fn write_blocks(&self, out: &mut dyn io::Write) -> io::Result<()> {
        write_matrix_block(out, "M", &self.m)?;
        write_vector_block(out, "labels", &self.labels)
    }
}

/// Smoothed maximum `g(x) = r·log Σᵢ exp((⟨Mᵢ, x⟩ − bᵢ)/r)`.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    pub m: Matrix,
    pub b: Vec<f64>,
    pub r: f64,
}

impl LogSumExp {
    fn scaled_logits(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.m.matvec(x);
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi = (*zi - bi) / self.r;
        }
        z
    }

    /// Softmax weights of the scaled logits at `x`.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        let z = self.scaled_logits(x);
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = z.iter().map(|zi| (zi - zmax).exp()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= s);
        w
    }
}

impl SmoothFunction for LogSumExp {
    fn dim(&self) -> usize {
        self.m.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.scaled_logits(x);
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = z.iter().map(|zi| (zi - zmax).exp()).sum();
        self.r * (zmax + s.ln())
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.m.tr_matvec(&self.weights(x))
    }

    fn kind(&self) -> &'static str {
        "logsumexp"
    }

    fn write_blocks(&self, out: &mut dyn io::Write) -> io::Result<()> {
        write_scalar(out, "r", self.r)?;
        write_matrix_block(out, "M", &self.m)?;
        write_vector_block(out, "b", &self.b)
    }
}
