use super::{ensure_finite, SolverError};
use crate::numerics::norm2;
use crate::objective::CompositeObjective;

/// `h_k = scale · k^(−exponent)` for `k ≥ 1`.
pub fn classic_step_size(k: usize, scale: f64, exponent: f64) -> Result<f64, SolverError> {
    if k == 0 {
        return Err(SolverError::InvalidConfig(
            "classical subgradient schedule starts at k = 1".into(),
        ));
    }
    Ok(scale * (k as f64).powf(-exponent))
}

/// Plain subgradient step `x − h_k ∂⁻f(x)` without any crossing logic.
pub fn classic_subgrad_step(
    obj: &CompositeObjective,
    x: &[f64],
    k: usize,
    scale: f64,
    exponent: f64,
) -> Result<Vec<f64>, SolverError> {
    let h = classic_step_size(k, scale, exponent)?;
    let d = obj.min_norm_subgradient(x)?;
    let next: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi - h * di).collect();
    ensure_finite(&next, "classical step x − h_k∂⁻f(x)")?;
    Ok(next)
}

/// Step-length form `x − ν_k ∂⁻f(x)/‖∂⁻f(x)‖₂` with `ν_k` from the same
/// schedule. Returns `x` unchanged when `∂⁻f(x) = 0`.
pub fn classic_normalized_step(
    obj: &CompositeObjective,
    x: &[f64],
    k: usize,
    scale: f64,
    exponent: f64,
) -> Result<Vec<f64>, SolverError> {
    let nu = classic_step_size(k, scale, exponent)?;
    let d = obj.min_norm_subgradient(x)?;
    let norm = norm2(&d);
    if norm == 0.0 {
        return Ok(x.to_vec());
    }
    let next: Vec<f64> = x
        .iter()
        .zip(&d)
        .map(|(xi, di)| xi - nu * di / norm)
        .collect();
    ensure_finite(&next, "normalized classical step")?;
    Ok(next)
}
