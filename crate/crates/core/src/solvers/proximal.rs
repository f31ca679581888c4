use super::{check_step, ensure_finite, SolverError};
use crate::numerics::dot;
use crate::objective::CompositeObjective;

/// `S_τ(z)ᵢ = sign(zᵢ)·max(|zᵢ| − τ, 0)`, the proximal map of `τ‖·‖₁`.
pub fn soft_threshold(z: &[f64], tau: f64) -> Vec<f64> {
    z.iter()
        .map(|&zi| {
            let m = zi.abs() - tau;
            if m > 0.0 {
                zi.signum() * m
            } else {
                0.0
            }
        })
        .collect()
}

fn forward_backward(obj: &CompositeObjective, y: &[f64], h: f64) -> Result<Vec<f64>, SolverError> {
    let grad = obj.gradient(y)?;
    let forward: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - h * gi).collect();
    ensure_finite(&forward, "forward step y − h∇g(y)")?;
    Ok(soft_threshold(&forward, obj.gamma() * h))
}

/// One forward-backward (ISTA) step `S_{γh}(x − h∇g(x))`.
pub fn ista_step(obj: &CompositeObjective, x: &[f64], h: f64) -> Result<Vec<f64>, SolverError> {
    check_step(h)?;
    forward_backward(obj, x, h)
}

/// FISTA iterate `x`, extrapolated point `y` and momentum parameter `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FistaState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    /// Number of gradient-scheme restarts so far.
    pub restarts: usize,
}

impl FistaState {
    pub fn new(x0: &[f64]) -> Self {
        Self {
            x: x0.to_vec(),
            y: x0.to_vec(),
            t: 1.0,
            restarts: 0,
        }
    }
}

/// One FISTA step with gradient-scheme adaptive restart: when
/// `⟨y − x⁺, x⁺ − x⟩ > 0` the momentum is dropped (`t = 1`, `y = x⁺`).
pub fn fista_restart_step(
    obj: &CompositeObjective,
    state: &mut FistaState,
    h: f64,
) -> Result<(), SolverError> {
    check_step(h)?;
    let x_next = forward_backward(obj, &state.y, h)?;
    let t_next = 0.5 * (1.0 + (1.0 + 4.0 * state.t * state.t).sqrt());

    let step: Vec<f64> = x_next.iter().zip(&state.x).map(|(a, b)| a - b).collect();
    let residual: Vec<f64> = state.y.iter().zip(&x_next).map(|(a, b)| a - b).collect();
    if dot(&residual, &step) > 0.0 {
        state.t = 1.0;
        state.y.clone_from(&x_next);
        state.restarts += 1;
    } else {
        let beta = (state.t - 1.0) / t_next;
        state.y = x_next
            .iter()
            .zip(&step)
            .map(|(xi, si)| xi + beta * si)
            .collect();
        state.t = t_next;
    }
    state.x = x_next;
    Ok(())
}
