//! Executable property checks behind the `verify` subcommand: linear rate,
//! per-iteration dominance of the accelerated method, the minimal-norm
//! subgradient against a search oracle, the nonsmooth PL inequality,
//! anti-oscillation on a 1D kink and finite-difference gradient checks.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{norm2, solve_qr, Matrix, NumericsError, Rng};
use crate::objective::{CompositeObjective, ObjectiveError};
use crate::problems::{
    make_quadratic, make_quadratic_with_spectrum, ProblemError, ProblemSpec, Quadratic,
};
use crate::solvers::{
    alg1_step, alg2_step, classic_subgrad_step, fista_restart_step, FistaState, SolverError,
    SolverState,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("could not certify an exact minimizer: {0}")]
    NoMinimizer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Rate,
    Dominance,
    SubgradOracle,
    Pl,
    Oscillation,
    Gradients,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Rate,
        Suite::Dominance,
        Suite::SubgradOracle,
        Suite::Pl,
        Suite::Oscillation,
        Suite::Gradients,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Rate => "rate",
            Suite::Dominance => "dominance",
            Suite::SubgradOracle => "subgrad-oracle",
            Suite::Pl => "pl",
            Suite::Oscillation => "oscillation",
            Suite::Gradients => "gradients",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// Outcome of one property with its measured margin.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub suite: Suite,
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.property,
            self.detail
        )
    }
}

/// Runs `suite` (every suite for [`Suite::All`]) with instance seeds
/// starting at `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, seed)?);
            }
            Ok(all)
        }
        Suite::Rate => rate(seed),
        Suite::Dominance => dominance(seed),
        Suite::SubgradOracle => subgrad_oracle(seed),
        Suite::Pl => pl(seed),
        Suite::Oscillation => oscillation(),
        Suite::Gradients => gradients(seed),
    }
}

/// Exact minimizer of `½xᵀMx + bᵀx + γ‖x‖₁` for positive definite `M`:
/// restarted FISTA identifies the support and signs, which are then fixed
/// by solving `M_SS z = −(b_S + γ s_S)` and corrected until the optimality
/// conditions hold to working precision.
pub fn exact_quadratic_minimizer(
    m: &Matrix,
    b: &[f64],
    gamma: f64,
    lipschitz: f64,
) -> Result<Vec<f64>, VerifyError> {
    let n = b.len();
    let obj = CompositeObjective::new(
        Arc::new(Quadratic {
            m: m.clone(),
            b: b.to_vec(),
        }),
        gamma,
        lipschitz,
        None,
    )?;
    let mut state = FistaState::new(&vec![0.0; n]);
    for k in 1..=100_000 {
        fista_restart_step(&obj, &mut state, 1.0 / lipschitz)?;
        if k % 50 == 0 && norm2(&obj.min_norm_subgradient(&state.x)?) < 1e-11 {
            break;
        }
    }

    let mut signs: Vec<f64> = state
        .x
        .iter()
        .map(|v| if *v == 0.0 { 0.0 } else { v.signum() })
        .collect();
    for _ in 0..20 {
        let support: Vec<usize> = (0..n).filter(|&i| signs[i] != 0.0).collect();
        let mut x = vec![0.0; n];
        if !support.is_empty() {
            let mss = Matrix::from_row_major(
                support.len(),
                support.len(),
                support
                    .iter()
                    .flat_map(|&i| support.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| m[(i, j)])
                    .collect(),
            );
            let rhs: Vec<f64> = support
                .iter()
                .map(|&i| -(b[i] + gamma * signs[i]))
                .collect();
            for (z, &i) in solve_qr(&mss, &rhs)?.into_iter().zip(&support) {
                x[i] = z;
            }
        }
        let grad = obj.gradient(&x)?;
        let tol = 1e-9 * (1.0 + gamma);
        let mut changed = false;
        for i in 0..n {
            if signs[i] != 0.0 && x[i] * signs[i] <= 0.0 {
                signs[i] = 0.0;
                changed = true;
            } else if signs[i] == 0.0 && grad[i].abs() > gamma + tol {
                signs[i] = -grad[i].signum();
                changed = true;
            }
        }
        if !changed {
            return Ok(x);
        }
    }
    Err(VerifyError::NoMinimizer(
        "active-set correction did not settle".into(),
    ))
}

/// `f(x) − f(x*)` for `f = ½xᵀMx + bᵀx + γ‖x‖₁`, evaluated through
/// `Δ = x − x*` so that gaps far below the rounding level of `f` itself
/// remain resolvable.
pub fn quadratic_gap(m: &Matrix, b: &[f64], gamma: f64, x_star: &[f64], x: &[f64]) -> f64 {
    let delta: Vec<f64> = x.iter().zip(x_star).map(|(a, s)| a - s).collect();
    let md = m.matvec(&delta);
    let grad_star: Vec<f64> = m
        .matvec(x_star)
        .iter()
        .zip(b)
        .map(|(v, bi)| v + bi)
        .collect();
    let mut linear = 0.0;
    for i in 0..x.len() {
        let s = x_star[i];
        linear += if s != 0.0 && x[i].signum() == s.signum() {
            // The γ term is linear in x on this orthant.
            (grad_star[i] + gamma * s.signum()) * delta[i]
        } else {
            grad_star[i] * delta[i] + gamma * (x[i].abs() - s.abs())
        };
    }
    0.5 * crate::numerics::dot(&delta, &md) + linear
}

fn quadratic_parts(obj: &CompositeObjective) -> (Matrix, Vec<f64>) {
    let (m, b) = obj
        .smooth()
        .quadratic_form()
        .expect("quadratic instance exposes its form");
    (m.clone(), b.to_vec())
}

fn rate(seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    const INSTANCES: u64 = 10;
    const ITERS: usize = 300;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for s in seed..seed + INSTANCES {
        let inst = make_quadratic_with_spectrum(30, 1.0, 10.0, true, &mut Rng::new(s))?;
        let obj = &inst.objective;
        let (m, b) = quadratic_parts(obj);
        let mu = obj.mu().expect("planted μ");
        let l = obj.lipschitz();
        let kappa = (1.0 - mu / l).max(1.0 / (1.0 + mu / l));
        let x_star = exact_quadratic_minimizer(&m, &b, obj.gamma(), l)?;
        let h = 1.0 / l;
        let mut x = inst.x0.clone();
        let gap0 = quadratic_gap(&m, &b, obj.gamma(), &x_star, &x);
        let mut bound = gap0;
        let mut ok = true;
        for _ in 1..=ITERS {
            x = alg1_step(obj, &x, h)?;
            bound *= kappa;
            let gap = quadratic_gap(&m, &b, obj.gamma(), &x_star, &x);
            if gap > bound * (1.0 + 1e-9) {
                ok = false;
            }
            if bound > 0.0 {
                worst = worst.max(gap / bound);
            }
        }
        if !ok {
            failures += 1;
        }
    }
    Ok(vec![PropertyResult {
        suite: Suite::Rate,
        property: "linear-rate".into(),
        passed: failures == 0,
        detail: format!(
            "max gap_k/(κ^k·gap_0) = {worst:.6e} over {INSTANCES} quadratics (n=30, μ=1, L=10), k ≤ {ITERS}; {failures} violations"
        ),
    }])
}

fn dominance(seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    const ITERS: usize = 200;
    let specs = [
        ProblemSpec::Quadratic { n: 40 },
        ProblemSpec::Lasso { m: 60, n: 80 },
        ProblemSpec::Logistic { m: 100, n: 30 },
        ProblemSpec::LogSumExp {
            k: 100,
            n: 50,
            r: 5.0,
        },
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0usize;
    let mut sign_flips = 0usize;
    let count = 20u64;
    for t in 0..count {
        let spec = specs[t as usize % specs.len()];
        let mut inst = spec.generate(seed + t)?;
        if t % 2 == 1 {
            let g = inst.objective.gamma() * 0.1;
            inst = inst.with_gamma(g)?;
        }
        let obj = &inst.objective;
        let h = 1.0 / obj.lipschitz();
        let mut state = SolverState::new(obj, &inst.x0)?;
        for _ in 0..ITERS {
            let step = alg2_step(obj, &state, h)?;
            let f_q = obj.value(&step.q)?;
            let excess = (step.state.f_x - f_q) / (1.0 + f_q.abs());
            worst = worst.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
            sign_flips += step
                .q
                .iter()
                .zip(&step.state.x)
                .filter(|(a, b)| (**a > 0.0 && **b < 0.0) || (**a < 0.0 && **b > 0.0))
                .count();
            state = step.state;
        }
    }
    Ok(vec![
        PropertyResult {
            suite: Suite::Dominance,
            property: "f(q') ≤ f(q)".into(),
            passed: violations == 0,
            detail: format!(
                "max (f(q') − f(q))/(1+|f(q)|) = {worst:.3e} (tolerance 1e-12) over {count} instances × {ITERS} iterations; {violations} violations"
            ),
        },
        PropertyResult {
            suite: Suite::Dominance,
            property: "sign-consistency".into(),
            passed: sign_flips == 0,
            detail: format!("{sign_flips} components flipped strict sign in the momentum phase"),
        },
    ])
}

/// Minimizes `|a + γν|` over `ν ∈ [−1, 1]` by ternary search.
fn ternary_min(a: f64, gamma: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if (a + gamma * m1).abs() <= (a + gamma * m2).abs() {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    a + gamma * 0.5 * (lo + hi)
}

fn subgrad_oracle(seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    const POINTS: usize = 100;
    let mut rng = Rng::new(seed);
    let mut worst: f64 = 0.0;
    for p in 0..POINTS {
        let n = 1 + p % 3;
        let spec = match p % 4 {
            0 => ProblemSpec::Quadratic { n },
            1 => ProblemSpec::Lasso { m: 4, n },
            2 => ProblemSpec::Logistic { m: 6, n },
            _ => ProblemSpec::LogSumExp { k: 5, n, r: 1.0 },
        };
        let inst = spec.generate(seed.wrapping_add(p as u64))?;
        let obj = &inst.objective;
        let x: Vec<f64> = (0..n)
            .map(|_| {
                if rng.bernoulli(0.5).expect("valid p") {
                    0.0
                } else {
                    rng.standard_normal()
                }
            })
            .collect();
        let grad = obj.gradient(&x)?;
        let gamma = obj.gamma();
        let oracle: Vec<f64> = (0..n)
            .map(|i| {
                if x[i] == 0.0 {
                    ternary_min(grad[i], gamma)
                } else {
                    grad[i] + gamma * x[i].signum()
                }
            })
            .collect();
        let d = obj.min_norm_subgradient(&x)?;
        let diff: Vec<f64> = d.iter().zip(&oracle).map(|(a, b)| a - b).collect();
        worst = worst.max(norm2(&diff));
    }
    Ok(vec![PropertyResult {
        suite: Suite::SubgradOracle,
        property: "minimal-norm".into(),
        passed: worst <= 1e-8,
        detail: format!(
            "max ‖∂⁻f − oracle‖₂ = {worst:.3e} (tolerance 1e-8) over {POINTS} points, n ≤ 3"
        ),
    }])
}

fn pl(seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    const INSTANCES: u64 = 5;
    const POINTS: usize = 40;
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for s in seed..seed + INSTANCES {
        let mut rng = Rng::new(s);
        let inst = make_quadratic(10, &mut rng)?;
        let obj = &inst.objective;
        let (m, b) = quadratic_parts(obj);
        let mu = obj.mu().expect("strongly convex");
        let x_star = exact_quadratic_minimizer(&m, &b, obj.gamma(), obj.lipschitz())?;
        for p in 0..POINTS {
            // Alternate far points and points close to x* sharing its zeros.
            let x: Vec<f64> = if p % 2 == 0 {
                (0..10)
                    .map(|_| {
                        if rng.bernoulli(0.3).expect("valid p") {
                            0.0
                        } else {
                            rng.gaussian(0.0, 2.0).expect("valid std")
                        }
                    })
                    .collect()
            } else {
                let scale = 10f64.powi(-((p % 9) as i32));
                x_star
                    .iter()
                    .map(|v| {
                        if *v == 0.0 {
                            0.0
                        } else {
                            v + scale * rng.standard_normal()
                        }
                    })
                    .collect()
            };
            let gap = quadratic_gap(&m, &b, obj.gamma(), &x_star, &x);
            let d = norm2(&obj.min_norm_subgradient(&x)?);
            let rhs = d * d / (2.0 * mu);
            let excess = gap - (rhs * (1.0 + 1e-9) + 1e-9);
            worst = worst.max(excess);
            if excess > 0.0 {
                violations += 1;
            }
        }
    }
    Ok(vec![PropertyResult {
        suite: Suite::Pl,
        property: "f(x) − f* ≤ ‖∂⁻f(x)‖²/(2μ)".into(),
        passed: violations == 0,
        detail: format!(
            "max excess = {worst:.3e} over {} points; {violations} violations",
            INSTANCES as usize * POINTS
        ),
    }])
}

fn oscillation() -> Result<Vec<PropertyResult>, VerifyError> {
    // f(x) = 0.005x² + |x|, L = 0.01, h = 1/L = 100.
    let obj = CompositeObjective::new(
        Arc::new(Quadratic {
            m: Matrix::from_rows(&[vec![0.01]]),
            b: vec![0.0],
        }),
        1.0,
        0.01,
        Some(0.01),
    )?;
    let h = 1.0 / obj.lipschitz();
    let x0 = vec![0.37];

    let mut x = x0.clone();
    let mut first_zero = None;
    let mut stayed = true;
    for k in 1..=1000 {
        x = alg1_step(&obj, &x, h)?;
        match (first_zero, x[0] == 0.0) {
            (None, true) => first_zero = Some(k),
            (Some(_), false) => stayed = false,
            _ => {}
        }
    }

    let mut y = x0;
    let mut closest = f64::INFINITY;
    for k in 1..=10_000 {
        y = classic_subgrad_step(&obj, &y, k, h, 0.0)?;
        closest = closest.min(y[0].abs());
    }

    Ok(vec![
        PropertyResult {
            suite: Suite::Oscillation,
            property: "alg1-reaches-zero".into(),
            passed: stayed && first_zero.is_some_and(|k| k <= 5),
            detail: format!(
                "first exact zero at k = {}, {} afterwards (limit k ≤ 5)",
                first_zero.map_or("never".into(), |k| k.to_string()),
                if stayed { "stays" } else { "leaves" }
            ),
        },
        PropertyResult {
            suite: Suite::Oscillation,
            property: "classic-oscillates".into(),
            passed: closest > h / 4.0,
            detail: format!(
                "min |xᵏ| over k ≤ 10⁴ = {closest:.6e} (must exceed h/4 = {:.6e})",
                h / 4.0
            ),
        },
    ])
}

fn gradients(seed: u64) -> Result<Vec<PropertyResult>, VerifyError> {
    let specs = [
        ProblemSpec::Quadratic { n: 20 },
        ProblemSpec::Lasso { m: 30, n: 20 },
        ProblemSpec::Logistic { m: 40, n: 15 },
        ProblemSpec::LogSumExp {
            k: 30,
            n: 20,
            r: 5.0,
        },
        ProblemSpec::Toy2d,
    ];
    let eps = 1e-6;
    let mut out = Vec::new();
    for spec in specs {
        let inst = spec.generate(seed)?;
        let g = inst.objective.smooth();
        let n = g.dim();
        let mut rng = Rng::new(seed ^ 0x9e37_79b9);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let grad = g.gradient(&x);
            let mut xp = x.clone();
            let fd: Vec<f64> = (0..n)
                .map(|i| {
                    xp[i] = x[i] + eps;
                    let up = g.value(&xp);
                    xp[i] = x[i] - eps;
                    let down = g.value(&xp);
                    xp[i] = x[i];
                    (up - down) / (2.0 * eps)
                })
                .collect();
            let diff: Vec<f64> = fd.iter().zip(&grad).map(|(a, b)| a - b).collect();
            worst = worst.max(norm2(&diff) / norm2(&grad).max(1.0));
        }
        out.push(PropertyResult {
            suite: Suite::Gradients,
            property: spec.family().into(),
            passed: worst < 1e-5,
            detail: format!(
                "max relative FD error = {worst:.3e} (ε = 1e-6, tolerance 1e-5) at 10 points"
            ),
        });
    }
    Ok(out)
}
