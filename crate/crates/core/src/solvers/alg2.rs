use super::alg1::subgradient_phase;
use super::{check_step, ensure_finite, SolverError, SolverState};
use crate::numerics::dot;
use crate::objective::CompositeObjective;

/// Result of one accelerated iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Alg2Step {
    /// Updated iterate `q'`, momentum, counter and `f(q')`.
    pub state: SolverState,
    /// Output `q` of the subgradient phase, i.e. what a plain
    /// [`super::alg1_step`] from the same point returns. `f(q') ≤ f(q)`
    /// holds by construction.
    pub q: Vec<f64>,
}

/// One iteration of the accelerated conservative subgradient method.
///
/// Subgradient phase: the crossing-aware step of [`super::alg1_step`], with
/// momentum cleared on components that land on zero or take part in a
/// crossing, and cleared entirely when the pinned candidate wins.
///
/// Momentum phase: `q' = q + √h·p`; components of `q'` that would change
/// strict sign relative to `q` are pinned at zero and `p` is adjusted to
/// match. With `r = ⟨∂̃f(q'), p⟩`, the move is kept and
/// `p ← p + (q − q_old)/√h` if `r ≤ 0`; otherwise the move is dropped
/// (`q' = q`) and `p ← (q − q_old)/√h`.
pub fn alg2_step(
    obj: &CompositeObjective,
    state: &SolverState,
    h: f64,
) -> Result<Alg2Step, SolverError> {
    check_step(h)?;
    let sqrt_h = h.sqrt();
    let mut p = state.p.clone();

    let phase = subgradient_phase(obj, &state.x, h)?;
    let q = phase.next;
    let q_old = phase.anchor;
    match &phase.crossing {
        None => {
            for (pi, qi) in p.iter_mut().zip(&q) {
                if *qi == 0.0 {
                    *pi = 0.0;
                }
            }
        }
        Some(crossing) => {
            if crossing.took_pinned {
                p.iter_mut().for_each(|pi| *pi = 0.0);
            } else {
                for &i in &crossing.indices {
                    p[i] = 0.0;
                }
            }
        }
    }

    let mut q_prime: Vec<f64> = q.iter().zip(&p).map(|(qi, pi)| qi + sqrt_h * pi).collect();
    ensure_finite(&q_prime, "momentum step q' = q + √h·p")?;
    for i in 0..q.len() {
        if (q_prime[i] > 0.0 && q[i] < 0.0) || (q_prime[i] < 0.0 && q[i] > 0.0) {
            q_prime[i] = 0.0;
            p[i] = -q[i] / sqrt_h;
        }
    }

    let r = dot(&obj.directional_subgradient(&q, &q_prime)?, &p);
    if !r.is_finite() {
        return Err(SolverError::NonFinite {
            stage: "restart test r = ⟨∂̃f(q'), p⟩",
        });
    }
    if r <= 0.0 {
        for i in 0..p.len() {
            p[i] += (q[i] - q_old[i]) / sqrt_h;
        }
    } else {
        q_prime.clone_from(&q);
        for i in 0..p.len() {
            p[i] = (q[i] - q_old[i]) / sqrt_h;
        }
    }
    ensure_finite(&p, "momentum update")?;

    let f_x = obj.value(&q_prime)?;
    Ok(Alg2Step {
        state: SolverState {
            x: q_prime,
            p,
            k: state.k + 1,
            f_x,
        },
        q,
    })
}
