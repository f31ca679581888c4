use crate::numerics::norm2;
use crate::problems::ProblemInstance;
use crate::solvers::{alg1_step, fista_restart_step, FistaState, SolverError};

/// Budget and tolerance of the long-run reference solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    /// Restarted-FISTA iterations.
    pub fista_budget: usize,
    /// Crossing-aware subgradient polish steps after FISTA.
    pub polish_cap: usize,
    /// Certification threshold on `‖∂⁻f(x)‖₂`.
    pub tol: f64,
    /// Iterations between certificate checks.
    pub check_every: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            fista_budget: 50_000,
            polish_cap: 20_000,
            tol: 1e-10,
            check_every: 25,
        }
    }
}

/// A reference optimal value with its quality certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub value: f64,
    /// `‖∂⁻f‖₂` at the point the certificate was measured; `NaN` for an
    /// analytic value without a known minimizer.
    pub subgrad_norm: f64,
    pub certified: bool,
    pub analytic: bool,
}

/// Analytic optimum when the instance carries one, long-run solve otherwise.
pub fn reference_optimum(
    inst: &ProblemInstance,
    opts: &ReferenceOptions,
) -> Result<ReferenceValue, SolverError> {
    match inst.f_ref {
        Some(value) => {
            let subgrad_norm = match &inst.minimizer {
                Some(x) => norm2(&inst.objective.min_norm_subgradient(x)?),
                None => f64::NAN,
            };
            Ok(ReferenceValue {
                value,
                subgrad_norm,
                certified: true,
                analytic: true,
            })
        }
        None => long_run_reference(inst, opts),
    }
}

/// Restarted FISTA followed by a crossing-aware subgradient polish. The
/// returned value is the smallest objective value seen at any check point;
/// it is certified when `‖∂⁻f‖₂ < tol` was reached.
pub fn long_run_reference(
    inst: &ProblemInstance,
    opts: &ReferenceOptions,
) -> Result<ReferenceValue, SolverError> {
    let obj = &inst.objective;
    let h = 1.0 / obj.lipschitz();
    let every = opts.check_every.max(1);

    let mut best = obj.value(&inst.x0)?;
    let mut norm = norm2(&obj.min_norm_subgradient(&inst.x0)?);
    let mut state = FistaState::new(&inst.x0);
    let mut k = 0;
    while norm >= opts.tol && k < opts.fista_budget {
        fista_restart_step(obj, &mut state, h)?;
        k += 1;
        if k % every == 0 || k == opts.fista_budget {
            best = best.min(obj.value(&state.x)?);
            norm = norm2(&obj.min_norm_subgradient(&state.x)?);
        }
    }

    let mut x = state.x;
    let mut k = 0;
    while norm >= opts.tol && k < opts.polish_cap {
        x = alg1_step(obj, &x, h)?;
        k += 1;
        if k % every == 0 || k == opts.polish_cap {
            best = best.min(obj.value(&x)?);
            norm = norm2(&obj.min_norm_subgradient(&x)?);
        }
    }
    best = best.min(obj.value(&x)?);
    if !best.is_finite() {
        return Err(SolverError::NonFinite {
            stage: "reference value",
        });
    }

    let certified = norm < opts.tol;
    if !certified {
        log::warn!(
            "reference for {} (seed {:?}) uncertified: ‖∂⁻f‖ = {norm:e}",
            inst.label,
            inst.seed
        );
    }
    Ok(ReferenceValue {
        value: best,
        subgrad_norm: norm,
        certified,
        analytic: false,
    })
}
