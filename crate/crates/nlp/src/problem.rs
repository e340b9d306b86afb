use std::fmt;
use std::sync::Arc;

use supportshape_core::constraints::{CoefficientPattern, LinearConstraints, NonlinearConstraints};
use supportshape_core::functionals::GradedValue;
use supportshape_core::ShapeError;

use crate::SolveError;

/// Failure to evaluate an objective at a point (e.g. a trial step leaves
/// the region where the functional is defined).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError(pub String);

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for EvalError {}

impl From<ShapeError> for EvalError {
    fn from(e: ShapeError) -> Self {
        EvalError(e.to_string())
    }
}

/// Scalar objective of the full coefficient vector.
pub trait Objective: Send + Sync {
    /// Value and gradient; the Hessian only when `want_hessian` and available.
    fn evaluate(&self, coeffs: &[f64], want_hessian: bool) -> Result<GradedValue, EvalError>;

    fn has_hessian(&self) -> bool {
        true
    }
}

/// Objective from a closure.
pub struct FnObjective<F> {
    f: F,
    hessian: bool,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64], bool) -> Result<GradedValue, EvalError> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f, hessian: true }
    }

    /// Closure that never returns a Hessian; the solver falls back to BFGS.
    pub fn gradient_only(f: F) -> Self {
        Self { f, hessian: false }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64], bool) -> Result<GradedValue, EvalError> + Send + Sync,
{
    fn evaluate(&self, coeffs: &[f64], want_hessian: bool) -> Result<GradedValue, EvalError> {
        (self.f)(coeffs, want_hessian && self.hessian)
    }

    fn has_hessian(&self) -> bool {
        self.hessian
    }
}

/// `min f(x)` subject to linear rows, optional `g(x) >= 0`, and fixed
/// coefficients; all in the full coefficient space.
#[derive(Clone)]
pub struct NlpProblem {
    pub objective: Arc<dyn Objective>,
    pub linear: LinearConstraints,
    pub nonlinear: Option<Arc<dyn NonlinearConstraints>>,
    pub pattern: CoefficientPattern,
    pub start: Vec<f64>,
}

impl fmt::Debug for NlpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NlpProblem")
            .field("coefficients", &self.pattern.len())
            .field("free", &self.pattern.free_len())
            .field("linear_rows", &self.linear.rows())
            .field("nonlinear_rows", &self.nonlinear.as_ref().map_or(0, |g| g.len()))
            .finish()
    }
}

impl NlpProblem {
    pub fn new(objective: Arc<dyn Objective>, pattern: CoefficientPattern, start: Vec<f64>) -> Self {
        let n = pattern.len();
        Self { objective, linear: LinearConstraints::empty(n), nonlinear: None, pattern, start }
    }

    pub fn with_linear(mut self, linear: LinearConstraints) -> Self {
        self.linear = linear;
        self
    }

    pub fn with_nonlinear(mut self, g: Arc<dyn NonlinearConstraints>) -> Self {
        self.nonlinear = Some(g);
        self
    }

    pub fn coeff_len(&self) -> usize {
        self.pattern.len()
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let n = self.pattern.len();
        let bad = |msg: String| Err(SolveError::InvalidProblem(msg));
        if self.start.len() != n {
            return bad(format!("start has {} entries, pattern {n}", self.start.len()));
        }
        if self.linear.coeff_len() != n {
            return bad(format!("linear rows have {} columns, pattern {n}", self.linear.coeff_len()));
        }
        if let Some(g) = &self.nonlinear {
            if g.coeff_len() != n {
                return bad(format!("nonlinear constraints take {} coefficients, pattern {n}", g.coeff_len()));
            }
        }
        if let Some(i) = self.start.iter().position(|v| !v.is_finite()) {
            return bad(format!("start entry {i} is not finite"));
        }
        let dev = self.pattern.fixed_deviation(&self.start);
        if dev != 0.0 {
            return bad(format!("start deviates from fixed coefficients by {dev:e}"));
        }
        Ok(())
    }

    /// Largest violation of the linear and nonlinear rows at a full point.
    pub fn max_violation(&self, coeffs: &[f64]) -> f64 {
        let lin = self.linear.max_violation(coeffs);
        let nl = self
            .nonlinear
            .as_ref()
            .map_or(0.0, |g| g.residual(coeffs).into_iter().fold(0.0f64, |m, r| m.max(-r)));
        lin.max(nl)
    }
}
