//! Constant-step subgradient methods for ℓ1-composite convex problems
//!
//! Objectives have the form `f(x) = g(x) + γ‖x‖₁` with `g` convex and
//! `∇g` Lipschitz. The crate provides:
//!
//! * [`numerics`]: dense vectors and matrices, a reproducible PRNG,
//!   Householder QR and power iteration.
//! * [`objective`]: the composite objective and its minimal-norm and
//!   directional subgradients.
//! * [`solvers`]: the crossing-aware subgradient method, its accelerated
//!   conservative variant with restarts, ISTA, restarted FISTA and the
//!   classical subgradient baseline, all behind one trace-recording driver.
//! * [`problems`]: seeded generators for the benchmark problem families.
//! * [`bench`]: reference optima, multi-trial averaging and CSV output.
//! * [`verify`]: executable property suites used by the `verify` subcommand.

pub mod bench;
pub mod cli;
pub mod numerics;
pub mod objective;
pub mod problems;
pub mod solvers;
pub mod verify;

pub use numerics::{Matrix, Rng};
pub use objective::{CompositeObjective, Partition, SmoothFunction};
pub use problems::{ProblemInstance, ProblemSpec};

pub use solvers::{IterationTrace, Method, SolverConfig, SolverState, StepSize};
