use super::{check_step, ensure_finite, SolverError};
use crate::objective::CompositeObjective;

/// Components that moved through (or onto, or off) zero during the trial
/// step, and which of the two repaired candidates was kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// `{i : xᵢ·x_tempᵢ ≤ 0}`, ascending.
    pub indices: Vec<usize>,
    /// The candidate `x'` (crossing components pinned at zero) was strictly
    /// better than `x''` and was returned.
    pub took_pinned: bool,
}

/// Outcome of one crossing-aware subgradient step from `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientPhase {
    /// The new iterate.
    pub next: Vec<f64>,
    /// The point the step is measured from: `x` itself without crossing,
    /// the pinned point `x'` otherwise.
    pub anchor: Vec<f64>,
    pub crossing: Option<Crossing>,
}

#[inline]
fn strictly_opposite(a: f64, b: f64) -> bool {
    (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)
}

/// One iteration of the constant-step subgradient method.
///
/// Takes the trial step `x_temp = x − h∂⁻f(x)`. If no component strictly
/// changes sign it is accepted. Otherwise every component with
/// `xᵢ·x_tempᵢ ≤ 0` is pinned at zero (giving `x'`), those components are
/// re-stepped with `∂⁻f(x')`, the rest keep their trial value (giving `x''`),
/// and the better of `x'` and `x''` is returned, `x''` on ties.
///
/// Sign tests compare signs directly rather than the sign of the product,
/// so the predicates stay exact when the product underflows.
pub fn subgradient_phase(
    obj: &CompositeObjective,
    x: &[f64],
    h: f64,
) -> Result<SubgradientPhase, SolverError> {
    check_step(h)?;
    let d = obj.min_norm_subgradient(x)?;
    let x_temp: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi - h * di).collect();
    ensure_finite(&x_temp, "trial step x_temp = x − h∂⁻f(x)")?;

    if !x
        .iter()
        .zip(&x_temp)
        .any(|(&a, &b)| strictly_opposite(a, b))
    {
        return Ok(SubgradientPhase {
            next: x_temp,
            anchor: x.to_vec(),
            crossing: None,
        });
    }

    let indices: Vec<usize> = (0..x.len())
        .filter(|&i| x[i] == 0.0 || x_temp[i] == 0.0 || strictly_opposite(x[i], x_temp[i]))
        .collect();
    let mut pinned = x.to_vec();
    for &i in &indices {
        pinned[i] = 0.0;
    }
    let d_pinned = obj.min_norm_subgradient(&pinned)?;
    let mut restepped = x_temp;
    for &i in &indices {
        restepped[i] = -h * d_pinned[i];
    }
    ensure_finite(&restepped, "corrected step x'' = x' + v''")?;

    let f_pinned = obj.value(&pinned)?;
    let f_restepped = obj.value(&restepped)?;
    if !(f_pinned.is_finite() && f_restepped.is_finite()) {
        return Err(SolverError::NonFinite {
            stage: "comparison f(x') < f(x'')",
        });
    }
    let took_pinned = f_pinned < f_restepped;
    let next = if took_pinned {
        pinned.clone()
    } else {
        restepped
    };
    Ok(SubgradientPhase {
        next,
        anchor: pinned,
        crossing: Some(Crossing {
            indices,
            took_pinned,
        }),
    })
}

/// One step of the crossing-aware constant-step subgradient method.
pub fn alg1_step(obj: &CompositeObjective, x: &[f64], h: f64) -> Result<Vec<f64>, SolverError> {
    Ok(subgradient_phase(obj, x, h)?.next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnSmooth;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn half_sq_1d(gamma: f64) -> CompositeObjective {
        let g = FnSmooth::new(1, |x| 0.5 * x[0] * x[0], |x| vec![x[0]]);
        CompositeObjective::new(Arc::new(g), gamma, 1.0, Some(1.0)).unwrap()
    }

    fn toy2d() -> (CompositeObjective, f64) {
        let c = 0.85;
        let g = FnSmooth::new(
            2,
            move |x| {
                0.5 * (x[0] * x[0] + 2.0 * c * x[0] * x[1] + 1.5 * x[1] * x[1]) - 2.0 * x[0]
                    + (1.0 - c) * x[1]
            },
            move |x| vec![x[0] + c * x[1] - 2.0, c * x[0] + 1.5 * x[1] + 1.0 - c],
        );
        // Largest eigenvalue of [[1, c], [c, 1.5]].
        let l = 1.25 + (0.0625f64 + c * c).sqrt();
        (
            CompositeObjective::new(Arc::new(g), 1.0, l, None).unwrap(),
            l,
        )
    }

    #[test]
    fn one_dimensional_crossing_lands_on_minimizer() {
        let obj = half_sq_1d(1.0);
        let phase = subgradient_phase(&obj, &[0.5], 1.0).unwrap();
        assert_eq!(phase.next, vec![0.0]);
        let crossing = phase.crossing.unwrap();
        assert_eq!(crossing.indices, vec![0]);
        // f(x') = f(x'') = 0: the tie goes to x''.
        assert!(!crossing.took_pinned);
    }

    #[test]
    fn fixed_point_at_minimizer() {
        let (obj, l) = toy2d();
        assert_eq!(
            alg1_step(&obj, &[1.0, 0.0], 1.0 / l).unwrap(),
            vec![1.0, 0.0]
        );
        assert_eq!(alg1_step(&half_sq_1d(1.0), &[0.0], 1.0).unwrap(), vec![0.0]);
    }

    #[test]
    fn toy2d_first_step() {
        let (obj, l) = toy2d();
        assert!((l - 2.136_002_257_333_467_4).abs() < 1e-12);
        let h = 1.0 / l;
        let phase = subgradient_phase(&obj, &[0.95, 0.5], h).unwrap();
        let crossing = phase.crossing.as_ref().expect("second component crosses");
        assert_eq!(crossing.indices, vec![1]);
        assert_eq!(phase.anchor, vec![0.95, 0.0]);
        // ∂₂⁻f(x') = sign(0.9575)·max(0.9575 − 1, 0) = 0, so x''₂ = 0 and
        // x''₁ = 0.95 − 0.375/L ≈ 0.77444. f(x') = −0.49875 beats
        // f(x'') ≈ −0.47456, so the pinned point is returned.
        assert!(crossing.took_pinned);
        assert_eq!(phase.next, vec![0.95, 0.0]);
        let x_dd = [0.774_438_387_781_415_2, 0.0];
        assert!((obj.value(&x_dd).unwrap() - (-0.474_560_979_546_676_3)).abs() < 1e-12);
        assert_eq!(obj.value(&phase.next).unwrap(), -0.49875);
    }

    #[test]
    fn gradient_evaluation_counts() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = calls.clone();
        let g = FnSmooth::new(
            1,
            |x| 0.5 * x[0] * x[0],
            move |x| {
                counter.fetch_add(1, Ordering::SeqCst);
                vec![x[0]]
            },
        );
        let obj = CompositeObjective::new(Arc::new(g), 0.1, 1.0, None).unwrap();
        alg1_step(&obj, &[2.0], 0.5).unwrap();
        assert_eq!(calls.swap(0, Ordering::SeqCst), 1);
        alg1_step(&obj, &[0.05], 1.5).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn crossing_components_use_pinned_subgradient() {
        // g(x) = ½‖x − a‖², γ small: the trial step overshoots component 0
        // through zero, and x''₀ must equal −h·∂₀⁻f(x').
        let a = [-0.3, 2.0];
        let g = FnSmooth::new(
            2,
            move |x| 0.5 * ((x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2)),
            move |x| vec![x[0] - a[0], x[1] - a[1]],
        );
        let obj = CompositeObjective::new(Arc::new(g), 0.1, 1.0, Some(1.0)).unwrap();
        let x = [0.2, 1.0];
        let h = 0.9;
        let phase = subgradient_phase(&obj, &x, h).unwrap();
        let crossing = phase.crossing.unwrap();
        assert_eq!(crossing.indices, vec![0]);
        let pinned = [0.0, 1.0];
        let d_pinned = obj.min_norm_subgradient(&pinned).unwrap();
        let d = obj.min_norm_subgradient(&x).unwrap();
        let expected = [-h * d_pinned[0], x[1] - h * d[1]];
        if !crossing.took_pinned {
            assert_eq!(phase.next, expected.to_vec());
        }
        assert!(obj.value(&phase.next).unwrap() <= obj.value(&x).unwrap());
    }

    #[test]
    fn zero_components_join_the_crossing_set() {
        // x₁ = 0 stays put while x₀ crosses: both are in I.
        let g = FnSmooth::new(
            2,
            |x| 0.5 * (x[0] + 1.0).powi(2) + 0.5 * x[1] * x[1],
            |x| vec![x[0] + 1.0, x[1]],
        );
        let obj = CompositeObjective::new(Arc::new(g), 0.5, 1.0, Some(1.0)).unwrap();
        let phase = subgradient_phase(&obj, &[0.1, 0.0], 1.0).unwrap();
        assert_eq!(phase.crossing.unwrap().indices, vec![0, 1]);
    }

    #[test]
    fn rejects_bad_step_and_non_finite() {
        let obj = half_sq_1d(1.0);
        assert!(alg1_step(&obj, &[1.0], 0.0).is_err());
        assert!(alg1_step(&obj, &[1.0], f64::NAN).is_err());
        let err = alg1_step(&obj, &[f64::INFINITY], 1.0).unwrap_err();
        assert!(matches!(err, SolverError::NonFinite { .. }), "{err}");
    }
}
