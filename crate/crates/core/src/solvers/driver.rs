use super::{
    alg1_step, alg2_step, classic_normalized_step, classic_subgrad_step, fista_restart_step,
    ista_step, FistaState, Method, SolverConfig, SolverError, SolverState,
};
use crate::objective::CompositeObjective;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub f_value: f64,
    /// `f(xᵏ) − f_ref` when a reference value was supplied.
    pub gap: Option<f64>,
}

/// Objective values of one run, `k = 0..=max_iter`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub method: Method,
    /// Resolved constant step, `None` for the diminishing classical schedule.
    pub step: Option<f64>,
    pub f_ref: Option<f64>,
    pub records: Vec<TraceRecord>,
    pub final_x: Vec<f64>,
}

impl IterationTrace {
    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.f_value)
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.gap)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.f_value)
    }
}

enum Runner {
    Plain(Vec<f64>),
    Accelerated(SolverState),
    Fista(FistaState),
}

impl Runner {
    fn x(&self) -> &[f64] {
        match self {
            Runner::Plain(x) => x,
            Runner::Accelerated(s) => &s.x,
            Runner::Fista(s) => &s.x,
        }
    }
}

/// Runs `cfg.method` from `x0` for `cfg.max_iter` iterations, recording
/// `f(xᵏ)` (and the gap to `f_ref`, if given) for every `k`.
pub fn run(
    obj: &CompositeObjective,
    x0: &[f64],
    cfg: &SolverConfig,
    f_ref: Option<f64>,
) -> Result<IterationTrace, SolverError> {
    cfg.validate()?;
    let h = cfg.step.resolve(obj);
    super::check_step(h)?;
    let initial = SolverState::new(obj, x0)?;

    let mut records = Vec::with_capacity(cfg.max_iter + 1);
    let record = |k: usize, f_value: f64| TraceRecord {
        k,
        f_value,
        gap: f_ref.map(|r| f_value - r),
    };
    records.push(record(0, initial.f_x));

    let mut runner = match cfg.method {
        Method::Alg2 => Runner::Accelerated(initial),
        Method::FistaRestart => Runner::Fista(FistaState::new(x0)),
        _ => Runner::Plain(initial.x),
    };

    for k in 1..=cfg.max_iter {
        let at = |e: SolverError| SolverError::AtIteration {
            k,
            source: Box::new(e),
        };
        let f_value = match &mut runner {
            Runner::Plain(x) => {
                *x = match cfg.method {
                    Method::Alg1 => alg1_step(obj, x, h),
                    Method::Ista => ista_step(obj, x, h),
                    Method::ClassicSubgrad if cfg.classic_normalized => classic_normalized_step(
                        obj,
                        x,
                        k,
                        cfg.classic_step_scale,
                        cfg.classic_step_exponent,
                    ),
                    Method::ClassicSubgrad => classic_subgrad_step(
                        obj,
                        x,
                        k,
                        cfg.classic_step_scale,
                        cfg.classic_step_exponent,
                    ),
                    Method::Alg2 | Method::FistaRestart => unreachable!(),
                }
                .map_err(at)?;
                obj.value(x).map_err(|e| at(e.into()))?
            }
            Runner::Accelerated(state) => {
                *state = alg2_step(obj, state, h).map_err(at)?.state;
                state.f_x
            }
            Runner::Fista(state) => {
                fista_restart_step(obj, state, h).map_err(at)?;
                obj.value(&state.x).map_err(|e| at(e.into()))?
            }
        };
        if !f_value.is_finite() {
            return Err(at(SolverError::NonFinite {
                stage: "objective value",
            }));
        }
        records.push(record(k, f_value));
    }

    Ok(IterationTrace {
        method: cfg.method,
        step: (cfg.method != Method::ClassicSubgrad).then_some(h),
        f_ref,
        records,
        final_x: runner.x().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnSmooth;
    use std::sync::Arc;

    fn toy(gamma: f64) -> CompositeObjective {
        let g = FnSmooth::new(
            2,
            |x| 0.5 * (4.0 * x[0] * x[0] + x[1] * x[1]) - 3.0 * x[0] + x[1],
            |x| vec![4.0 * x[0] - 3.0, x[1] + 1.0],
        );
        CompositeObjective::new(Arc::new(g), gamma, 4.0, Some(1.0)).unwrap()
    }

    #[test]
    fn zero_iterations_gives_single_record() {
        let obj = toy(0.5);
        for m in Method::ALL {
            let tr = run(&obj, &[1.0, 1.0], &SolverConfig::new(m, 0), Some(-1.0)).unwrap();
            assert_eq!(tr.records.len(), 1);
            assert_eq!(tr.records[0].k, 0);
            assert_eq!(tr.records[0].f_value, obj.value(&[1.0, 1.0]).unwrap());
            assert_eq!(tr.records[0].gap, Some(tr.records[0].f_value + 1.0));
        }
    }

    #[test]
    fn every_method_converges_on_a_small_problem() {
        // Separable stationarity: 4x₀ − 3 + γ = 0 and x₁ + 1 − γ = 0.
        let obj = toy(0.5);
        let x_star = [0.625, -0.5];
        let f_star = obj.value(&x_star).unwrap();
        for m in [
            Method::Alg1,
            Method::Alg2,
            Method::Ista,
            Method::FistaRestart,
        ] {
            let tr = run(&obj, &[2.0, 2.0], &SolverConfig::new(m, 300), Some(f_star)).unwrap();
            assert_eq!(tr.records.len(), 301);
            assert!(tr.final_gap().unwrap() < 1e-12, "{m}: {:?}", tr.final_gap());
            assert!((tr.final_x[0] - x_star[0]).abs() < 1e-6, "{m}");
        }
        let cfg = SolverConfig::new(Method::ClassicSubgrad, 300).with_classic_schedule(0.25, 1.0);
        let tr = run(&obj, &[2.0, 2.0], &cfg, Some(f_star)).unwrap();
        assert!(tr.step.is_none());
        assert!(tr.final_gap().unwrap() < 0.1);
    }

    #[test]
    fn step_errors_carry_the_iteration() {
        // ∇g overflows once the iterate grows: h far above 2/L diverges.
        let obj = toy(0.0);
        let cfg =
            SolverConfig::new(Method::Ista, 10_000).with_step(super::super::StepSize::Fixed(10.0));
        let err = run(&obj, &[1.0, 1.0], &cfg, None).unwrap_err();
        match err {
            SolverError::AtIteration { k, .. } => assert!(k > 1),
            other => panic!("unexpected {other}"),
        }
    }
}
