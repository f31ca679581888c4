use std::sync::Arc;

use super::functions::{sigmoid, LeastSquares, LogSumExp, Logistic, Quadratic};
use super::{ProblemError, ProblemInstance};
use crate::numerics::{norm_inf, random_orthogonal, spectral_norm, Matrix, Rng};
use crate::objective::{CompositeObjective, SmoothFunction};

/// Default coupling of the 2D example.
pub const TOY2D_C: f64 = 0.85;
/// Default ℓ1 weight of the 2D example.
pub const TOY2D_GAMMA: f64 = 1.0;
/// Default starting point of the 2D example.
pub const TOY2D_X0: [f64; 2] = [0.95, 0.5];

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 50_000;

fn check_size(name: &str, v: usize) -> Result<(), ProblemError> {
    if v == 0 {
        Err(ProblemError::InvalidParameter(format!(
            "{name} must be at least 1"
        )))
    } else {
        Ok(())
    }
}

/// `Q·diag(λ)·Qᵀ`, symmetrized.
fn planted_symmetric(q: &Matrix, lambda: &[f64]) -> Matrix {
    let mut ql = q.clone();
    ql.scale_columns(lambda);
    let mut m = ql.matmul(&q.transpose());
    m.symmetrize();
    m
}

/// Strongly convex quadratic `½xᵀMx + bᵀx + γ‖x‖₁` with eigenvalues of `M`
/// uniform in `[0.02, 100]`, `bᵢ ~ N(0, 4²)`, `γ = ¼‖b‖∞`, `x⁰ᵢ ~ N(0, 2²)`.
pub fn make_quadratic(n: usize, rng: &mut Rng) -> Result<ProblemInstance, ProblemError> {
    make_quadratic_with_spectrum(n, 0.02, 100.0, false, rng)
}

/// Quadratic family with eigenvalues uniform in `[lo, hi]`.
///
/// Draw order: `Q` (n² normals, row-major), `λ` (n uniforms), `b`
/// (n normals), `x⁰` (n normals). With `plant_extremes` and `n ≥ 2`,
/// `λ₀ = lo` and `λ₁ = hi` after drawing, so `μ = lo` and `L = hi` exactly.
/// `L` and `μ` are always the extreme entries of `λ`.
pub fn make_quadratic_with_spectrum(
    n: usize,
    lo: f64,
    hi: f64,
    plant_extremes: bool,
    rng: &mut Rng,
) -> Result<ProblemInstance, ProblemError> {
    check_size("n", n)?;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(ProblemError::InvalidParameter(format!(
            "eigenvalue range [{lo}, {hi}]"
        )));
    }
    let q = random_orthogonal(n, rng)?;
    let mut lambda = rng.uniform_vec(n, lo, hi)?;
    if plant_extremes && n >= 2 {
        lambda[0] = lo;
        lambda[1] = hi;
    }
    let b = rng.gaussian_vec(n, 0.0, 4.0)?;
    let x0 = rng.gaussian_vec(n, 0.0, 2.0)?;

    let l = lambda.iter().cloned().fold(f64::MIN, f64::max);
    let mu = lambda.iter().cloned().fold(f64::MAX, f64::min);
    let gamma = 0.25 * norm_inf(&b);

    // 1D: λx + b + γ·s = 0 gives x* = −S_γ(b)/λ.
    let (f_ref, minimizer) = if n == 1 {
        let shrunk = (b[0].abs() - gamma).max(0.0) * b[0].signum();
        let x = -shrunk / lambda[0];
        let f = 0.5 * lambda[0] * x * x + b[0] * x + gamma * x.abs();
        (Some(f), Some(vec![x]))
    } else {
        (None, None)
    };

    let m = planted_symmetric(&q, &lambda);
    let objective = CompositeObjective::new(Arc::new(Quadratic { m, b }), gamma, l, Some(mu))?;
    Ok(ProblemInstance {
        label: "quadratic".into(),
        seed: Some(rng.seed()),
        objective,
        x0,
        f_ref,
        minimizer,
    })
}

/// Sparse least squares `½‖Ax − b‖² + ‖x‖₁`.
///
/// Draw order: ground truth `y` (per component a Bernoulli(0.3) support
/// draw, then a U[0,1] value only when in the support), `U` (m×m), `V`
/// (n×n), singular values `σ` (min(m,n) uniforms in [1,10]), noise `w`
/// (m normals, std 0.1), `x⁰` (n normals, std 2). `A = U·diag(σ)·Vᵀ`,
/// `b = Ay + w`, `L = max σ²`.
pub fn make_lasso(m: usize, n: usize, rng: &mut Rng) -> Result<ProblemInstance, ProblemError> {
    check_size("m", m)?;
    check_size("n", n)?;
    let mut y = vec![0.0; n];
    for yi in y.iter_mut() {
        if rng.bernoulli(0.3)? {
            *yi = rng.uniform(0.0, 1.0)?;
        }
    }
    let u = random_orthogonal(m, rng)?;
    let v = random_orthogonal(n, rng)?;
    let r = m.min(n);
    let sigma = rng.uniform_vec(r, 1.0, 10.0)?;
    let w = rng.gaussian_vec(m, 0.0, 0.1)?;
    let x0 = rng.gaussian_vec(n, 0.0, 2.0)?;

    let mut us = u.leading_columns(r);
    us.scale_columns(&sigma);
    let a = us.matmul(&v.leading_columns(r).transpose());
    let mut b = a.matvec(&y);
    for (bi, wi) in b.iter_mut().zip(&w) {
        *bi += wi;
    }
    let smax = sigma.iter().cloned().fold(f64::MIN, f64::max);
    let objective =
        CompositeObjective::new(Arc::new(LeastSquares { a, b }), 1.0, smax * smax, None)?;
    Ok(ProblemInstance {
        label: "lasso".into(),
        seed: Some(rng.seed()),
        objective,
        x0,
        f_ref: None,
        minimizer: None,
    })
}

/// Sparse logistic regression.
///
/// Draw order: `x_real` (per component a Bernoulli(0.8) "is zero" draw,
/// then an N(0,1) value only when nonzero), `M` (m×n normals, row-major),
/// labels `bᵢ ~ Bernoulli(σ(⟨Mᵢ, x_real⟩))`, `x⁰` (n normals, std 2).
/// `γ = ¼‖∇g(0)‖∞`, `L = ¼·σ_max(M)²` by power iteration.
pub fn make_logistic(m: usize, n: usize, rng: &mut Rng) -> Result<ProblemInstance, ProblemError> {
    check_size("m", m)?;
    check_size("n", n)?;
    let mut x_real = vec![0.0; n];
    for xi in x_real.iter_mut() {
        if !rng.bernoulli(0.8)? {
            *xi = rng.standard_normal();
        }
    }
    let data: Vec<f64> = (0..m * n).map(|_| rng.standard_normal()).collect();
    let mat = Matrix::from_row_major(m, n, data);
    let margins = mat.matvec(&x_real);
    let labels = margins
        .iter()
        .map(|t| {
            rng.bernoulli(sigmoid(*t))
                .map(|b| if b { 1.0 } else { 0.0 })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let x0 = rng.gaussian_vec(n, 0.0, 2.0)?;

    let smax = spectral_norm(&mat, POWER_TOL, POWER_MAX_ITER)?.value;
    let smooth = Logistic { m: mat, labels };
    let gamma = 0.25 * norm_inf(&smooth.gradient(&vec![0.0; n]));
    let objective = CompositeObjective::new(Arc::new(smooth), gamma, 0.25 * smax * smax, None)?;
    Ok(ProblemInstance {
        label: "logistic".into(),
        seed: Some(rng.seed()),
        objective,
        x0,
        f_ref: None,
        minimizer: None,
    })
}

/// `r·log Σ exp((⟨Mᵢ, x⟩ − bᵢ)/r) + ‖x‖₁`.
///
/// Draw order: `M` (k×n normals, row-major), `b` (k normals), `x⁰`
/// (n normals). `L = σ_max(M)²/r` by power iteration.
pub fn make_logsumexp(
    k: usize,
    n: usize,
    r: f64,
    rng: &mut Rng,
) -> Result<ProblemInstance, ProblemError> {
    check_size("k", k)?;
    check_size("n", n)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(ProblemError::InvalidParameter(format!(
            "r = {r} must be positive"
        )));
    }
    let data: Vec<f64> = (0..k * n).map(|_| rng.standard_normal()).collect();
    let mat = Matrix::from_row_major(k, n, data);
    let b = rng.gaussian_vec(k, 0.0, 1.0)?;
    let x0 = rng.gaussian_vec(n, 0.0, 1.0)?;
    let smax = spectral_norm(&mat, POWER_TOL, POWER_MAX_ITER)?.value;
    let objective = CompositeObjective::new(
        Arc::new(LogSumExp { m: mat, b, r }),
        1.0,
        smax * smax / r,
        None,
    )?;
    Ok(ProblemInstance {
        label: "logsumexp".into(),
        seed: Some(rng.seed()),
        objective,
        x0,
        f_ref: None,
        minimizer: None,
    })
}

/// `½(x₁² + 2c·x₁x₂ + 1.5x₂²) − 2x₁ + (1 − c)x₂ + γ‖x‖₁`.
///
/// For `γ = 1` the minimizer is `(1, 0)` for every admissible `c`
/// (`∇g(1, 0) = (−1, 1)`), with optimal value `−0.5`.
pub fn make_2d(c: f64, gamma: f64, x0: &[f64]) -> Result<ProblemInstance, ProblemError> {
    if !(c.is_finite() && c * c < 1.5) {
        return Err(ProblemError::InvalidParameter(format!(
            "c = {c}: Hessian [[1, c], [c, 1.5]] is not positive definite"
        )));
    }
    if x0.len() != 2 {
        return Err(ProblemError::InvalidParameter(format!(
            "2D example needs a 2-dimensional start, got {}",
            x0.len()
        )));
    }
    let m = Matrix::from_rows(&[vec![1.0, c], vec![c, 1.5]]);
    let b = vec![-2.0, 1.0 - c];
    let disc = (0.0625 + c * c).sqrt();
    let (l, mu) = (1.25 + disc, 1.25 - disc);
    let objective = CompositeObjective::new(Arc::new(Quadratic { m, b }), gamma, l, Some(mu))?;
    let (f_ref, minimizer) = if gamma == 1.0 {
        (Some(-0.5), Some(vec![1.0, 0.0]))
    } else {
        (None, None)
    };
    Ok(ProblemInstance {
        label: "toy2d".into(),
        seed: None,
        objective,
        x0: x0.to_vec(),
        f_ref,
        minimizer,
    })
}

/// Randomly perturbed 2D example: `c`, `γ`, `x⁰₁`, `x⁰₂` drawn in that
/// order from Gaussians centred on the defaults with standard deviations
/// 0.1, 0.1, 0.05, 0.05. Draws with `c² ≥ 1.5` or `γ ≤ 0` are rejected and
/// all four values redrawn. The optimum is left for the caller to compute.
pub fn perturb_2d(rng: &mut Rng) -> Result<ProblemInstance, ProblemError> {
    loop {
        let c = rng.gaussian(TOY2D_C, 0.1)?;
        let gamma = rng.gaussian(TOY2D_GAMMA, 0.1)?;
        let x0 = [
            rng.gaussian(TOY2D_X0[0], 0.05)?,
            rng.gaussian(TOY2D_X0[1], 0.05)?,
        ];
        if c * c >= 1.5 || gamma <= 0.0 {
            continue;
        }
        let mut inst = make_2d(c, gamma, &x0)?;
        inst.label = "toy2d-perturbed".into();
        inst.seed = Some(rng.seed());
        inst.f_ref = None;
        inst.minimizer = None;
        return Ok(inst);
    }
}
