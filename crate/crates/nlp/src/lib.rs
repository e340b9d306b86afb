//! Deterministic interior-point solver for support-function shape problems.

mod audit;
mod ipm;
mod model;
mod multistart;
mod problem;
mod report;
mod solve;

pub use audit::{audit_gradient, audit_gradient_with_step, AuditReport};
pub use multistart::{best, multistart, random_start, start_seed, StartOutcome};
pub use problem::{EvalError, FnObjective, NlpProblem, Objective};
pub use report::{IterationRecord, Multipliers, SolveOptions, SolveReport, Status};
pub use solve::{recompute_kkt, solve, solve_with_sink};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("gradient audit failed: objective error {objective:e}, constraint error {constraints:e} (tolerance {tol:e})")]
    AuditFailure { objective: f64, constraints: f64, tol: f64 },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}
