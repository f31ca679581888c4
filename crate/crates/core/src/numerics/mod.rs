//! Dense linear algebra and seeded randomness.
//!
//! Vectors are plain `[f64]` slices / `Vec<f64>`. Dimension mismatches in
//! the vector kernels are programming errors and panic, the same way
//! out-of-bounds indexing does.

mod matrix;
mod qr;
mod rng;
mod spectral;

pub use matrix::Matrix;
pub use qr::{householder_qr, random_orthogonal, solve_qr};
pub use rng::Rng;
pub use spectral::{spectral_norm, SpectralEstimate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("spectral norm of a zero matrix is undefined")]
    ZeroMatrix,
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("matrix is singular to working precision")]
    Singular,
}

#[inline]
fn check_len(a: usize, b: usize, op: &str) {
    assert_eq!(a, b, "{op}: dimension mismatch ({a} vs {b})");
}

/// Inner product `⟨a, b⟩`.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    check_len(a.len(), b.len(), "dot");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y ← y + alpha·x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    check_len(x.len(), y.len(), "axpy");
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `a − b`
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    check_len(a.len(), b.len(), "sub");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + alpha·b`
pub fn add_scaled(a: &[f64], alpha: f64, b: &[f64]) -> Vec<f64> {
    check_len(a.len(), b.len(), "add_scaled");
    a.iter().zip(b).map(|(x, y)| x + alpha * y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// `y = M x`
pub fn matvec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    m.matvec(x)
}
