use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    Infeasible,
    /// No acceptable step could be found before reaching the tolerances;
    /// typically noise in the objective gradient.
    Stalled,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::Infeasible => "infeasible",
            Status::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tol_kkt: f64,
    pub tol_feas: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Check the analytic gradients against central differences at the start.
    pub audit: bool,
    pub audit_tol: f64,
    pub audit_step: f64,
    pub mu_init: f64,
    /// Ignore objective Hessians and use damped BFGS instead.
    pub force_bfgs: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_kkt: 1e-7,
            tol_feas: 1e-8,
            max_iter: 500,
            seed: 0,
            audit: true,
            audit_tol: 1e-4,
            audit_step: 1e-6,
            mu_init: 0.1,
            force_bfgs: false,
        }
    }
}

/// One accepted interior-point step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub phase: u8,
    pub value: f64,
    pub violation: f64,
    pub step_norm: f64,
    pub alpha: f64,
    pub mu: f64,
    /// Barrier merit before and after the step, at the same `mu`.
    pub merit_before: f64,
    pub merit_after: f64,
    pub kkt: f64,
    pub regularization: f64,
}

impl IterationRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Multipliers in the convention `∇f = Σ λ_i ∇c_i` on the free coefficients.
/// Linear rows: positive at an active lower bound, negative at an active
/// upper bound, 0 for rows without free columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Multipliers {
    pub linear: Vec<f64>,
    pub nonlinear: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub final_coeffs: Vec<f64>,
    pub value: f64,
    pub kkt_residual: f64,
    pub max_violation: f64,
    pub iterations: usize,
    pub status: Status,
    pub multipliers: Multipliers,
    pub log: Vec<IterationRecord>,
    pub seed: u64,
}
