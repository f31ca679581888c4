//! Reference implementations used only by the integration tests. Nothing
//! here calls into the solver code; instance data is read back through the
//! plain-text dump so each objective is re-evaluated from scratch.
#![allow(dead_code)]

use l1subgrad::problems::dump::{parse_dump, write_instance};
use l1subgrad::ProblemInstance;

pub type Dense = Vec<Vec<f64>>;

fn rows_of(m: &l1subgrad::Matrix) -> Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn mv(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

fn mtv(a: &Dense, y: &[f64]) -> Vec<f64> {
    let n = a.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; n];
    for (row, yi) in a.iter().zip(y) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v * yi;
        }
    }
    out
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// The smooth term of an instance, rebuilt from its dump.
#[derive(Debug, Clone)]
pub enum Smooth {
    Quadratic { m: Dense, b: Vec<f64> },
    LeastSquares { a: Dense, b: Vec<f64> },
    Logistic { m: Dense, labels: Vec<f64> },
    LogSumExp { m: Dense, b: Vec<f64>, r: f64 },
}

#[derive(Debug, Clone)]
pub struct OracleProblem {
    pub smooth: Smooth,
    pub gamma: f64,
}

impl OracleProblem {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let mut buf = Vec::new();
        write_instance(&mut buf, inst).unwrap();
        let dump = parse_dump(&String::from_utf8(buf).unwrap()).unwrap();
        let gamma: f64 = dump.header["gamma"].parse().unwrap();
        let block = |name: &str| rows_of(&dump.blocks[name]);
        let vector = |name: &str| dump.blocks[name].as_slice().to_vec();
        let smooth = match dump.header["smooth"].as_str() {
            "quadratic" => Smooth::Quadratic {
                m: block("M"),
                b: vector("b"),
            },
            "least_squares" => Smooth::LeastSquares {
                a: block("A"),
                b: vector("b"),
            },
            "logistic" => Smooth::Logistic {
                m: block("M"),
                labels: vector("labels"),
            },
            "logsumexp" => Smooth::LogSumExp {
                m: block("M"),
                b: vector("b"),
                r: dump.scalars["r"],
            },
            other => panic!("no oracle for smooth kind {other}"),
        };
        OracleProblem { smooth, gamma }
    }

    pub fn g(&self, x: &[f64]) -> f64 {
        match &self.smooth {
            Smooth::Quadratic { m, b } => 0.5 * dotp(x, &mv(m, x)) + dotp(b, x),
            Smooth::LeastSquares { a, b } => {
                let r: Vec<f64> = mv(a, x).iter().zip(b).map(|(p, q)| p - q).collect();
                0.5 * dotp(&r, &r)
            }
            Smooth::Logistic { m, labels } => mv(m, x)
                .iter()
                .zip(labels)
                .map(|(t, y)| {
                    // log(1 + e^{−t}) evaluated on the safe side.
                    let lse = if *t > 0.0 {
                        (-t).exp().ln_1p()
                    } else {
                        -t + t.exp().ln_1p()
                    };
                    (1.0 - y) * t + lse
                })
                .sum(),
            Smooth::LogSumExp { m, b, r } => {
                let z: Vec<f64> = mv(m, x).iter().zip(b).map(|(p, q)| (p - q) / r).collect();
                let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                r * (zmax + z.iter().map(|v| (v - zmax).exp()).sum::<f64>().ln())
            }
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.smooth {
            Smooth::Quadratic { m, b } => mv(m, x).iter().zip(b).map(|(p, q)| p + q).collect(),
            Smooth::LeastSquares { a, b } => {
                let r: Vec<f64> = mv(a, x).iter().zip(b).map(|(p, q)| p - q).collect();
                mtv(a, &r)
            }
            Smooth::Logistic { m, labels } => {
                let w: Vec<f64> = mv(m, x)
                    .iter()
                    .zip(labels)
                    .map(|(t, y)| (1.0 - y) - 1.0 / (1.0 + t.exp()))
                    .collect();
                mtv(m, &w)
            }
            Smooth::LogSumExp { m, b, r } => {
                let z: Vec<f64> = mv(m, x).iter().zip(b).map(|(p, q)| (p - q) / r).collect();
                let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = z.iter().map(|v| (v - zmax).exp()).collect();
                let s: f64 = e.iter().sum();
                let w: Vec<f64> = e.iter().map(|v| v / s).collect();
                mtv(m, &w)
            }
        }
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        self.g(x) + self.gamma * x.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Dense, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        assert!(a[col][col].abs() > 1e-300, "singular system");
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (t, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *t -= factor * p;
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (rhs[i] - s) / a[i][i];
    }
    x
}

fn soft(z: f64, t: f64) -> f64 {
    z.signum() * (z.abs() - t).max(0.0)
}

/// Minimizer of `½xᵀMx + bᵀx + γ‖x‖₁` (M positive definite): cyclic
/// coordinate descent to find the active set, then an exact solve on it,
/// repeated until the optimality conditions hold.
pub fn quadratic_minimizer(m: &Dense, b: &[f64], gamma: f64) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for _sweep in 0..20_000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[i][j] * x[j]).sum();
            let new = soft(-(b[i] + off), gamma) / m[i][i];
            moved = moved.max((new - x[i]).abs());
            x[i] = new;
        }
        if moved < 1e-13 {
            break;
        }
    }
    let mut signs: Vec<f64> = x
        .iter()
        .map(|v| if *v == 0.0 { 0.0 } else { v.signum() })
        .collect();
    for _ in 0..50 {
        let support: Vec<usize> = (0..n).filter(|&i| signs[i] != 0.0).collect();
        let mut z = vec![0.0; n];
        if !support.is_empty() {
            let sub: Dense = support
                .iter()
                .map(|&i| support.iter().map(|&j| m[i][j]).collect())
                .collect();
            let rhs = support
                .iter()
                .map(|&i| -(b[i] + gamma * signs[i]))
                .collect();
            for (v, &i) in gauss_solve(sub, rhs).into_iter().zip(&support) {
                z[i] = v;
            }
        }
        let grad: Vec<f64> = mv(m, &z).iter().zip(b).map(|(p, q)| p + q).collect();
        let mut changed = false;
        for i in 0..n {
            if signs[i] != 0.0 && z[i] * signs[i] <= 0.0 {
                signs[i] = 0.0;
                changed = true;
            } else if signs[i] == 0.0 && grad[i].abs() > gamma * (1.0 + 1e-12) + 1e-12 {
                signs[i] = -grad[i].signum();
                changed = true;
            }
        }
        if !changed {
            return z;
        }
    }
    panic!("active set did not settle");
}

/// Largest violation of the optimality conditions at `x`.
pub fn kkt_residual(m: &Dense, b: &[f64], gamma: f64, x: &[f64]) -> f64 {
    let grad: Vec<f64> = mv(m, x).iter().zip(b).map(|(p, q)| p + q).collect();
    x.iter()
        .zip(&grad)
        .map(|(xi, gi)| {
            if *xi == 0.0 {
                (gi.abs() - gamma).max(0.0)
            } else {
                (gi + gamma * xi.signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// `f(x) − f(x*)` through `Δ = x − x*`, resolvable far below the rounding
/// level of `f`.
pub fn quadratic_gap(m: &Dense, b: &[f64], gamma: f64, xs: &[f64], x: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(xs).map(|(p, q)| p - q).collect();
    let gs: Vec<f64> = mv(m, xs).iter().zip(b).map(|(p, q)| p + q).collect();
    let quad = 0.5 * dotp(&d, &mv(m, &d));
    let lin: f64 = (0..x.len())
        .map(|i| {
            if xs[i] != 0.0 && x[i] != 0.0 && x[i].signum() == xs[i].signum() {
                (gs[i] + gamma * xs[i].signum()) * d[i]
            } else {
                gs[i] * d[i] + gamma * (x[i].abs() - xs[i].abs())
            }
        })
        .sum();
    quad + lin
}

/// Closest point to zero of `{a + γν : ν ∈ grid}` with `grid` the points
/// `−1, −1 + step, …, 1`.
pub fn grid_min(a: f64, gamma: f64, step: f64) -> f64 {
    let count = (2.0 / step).round() as usize;
    (0..=count)
        .map(|j| a + gamma * (-1.0 + j as f64 * step))
        .min_by(|p, q| p.abs().partial_cmp(&q.abs()).unwrap())
        .unwrap()
}

/// Ternary search for `min |a + γν|` over `ν ∈ [−1, 1]`.
pub fn ternary_min(a: f64, gamma: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..300 {
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

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], eps: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + eps;
            let up = f(&xp);
            xp[i] = x[i] - eps;
            let down = f(&xp);
            xp[i] = x[i];
            (up - down) / (2.0 * eps)
        })
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
