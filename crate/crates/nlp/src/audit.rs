use crate::problem::NlpProblem;
use crate::SolveError;

/// Worst analytic-vs-central-difference discrepancy, relative to
/// `max(|fd|∞, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    pub objective_error: f64,
    pub constraint_error: f64,
}

impl AuditReport {
    pub fn max_error(&self) -> f64 {
        self.objective_error.max(self.constraint_error)
    }
}

pub fn audit_gradient(problem: &NlpProblem, point: &[f64]) -> Result<AuditReport, SolveError> {
    audit_gradient_with_step(problem, point, 1e-6)
}

/// Central differences along every free coefficient of a full point.
pub fn audit_gradient_with_step(problem: &NlpProblem, point: &[f64], h: f64) -> Result<AuditReport, SolveError> {
    let eval = |x: &[f64]| {
        problem.objective.evaluate(x, false).map_err(|e| SolveError::Evaluation(format!("audit: {e}")))
    };
    let base = eval(point)?;
    let free = &problem.pattern.free;
    let mut fd = Vec::with_capacity(free.len());
    let mut jac_fd = Vec::with_capacity(free.len());
    for &j in free {
        let mut xp = point.to_vec();
        let mut xm = point.to_vec();
        xp[j] += h;
        xm[j] -= h;
        fd.push((eval(&xp)?.value - eval(&xm)?.value) / (2.0 * h));
        if let Some(g) = &problem.nonlinear {
            let (rp, rm) = (g.residual(&xp), g.residual(&xm));
            jac_fd.push(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
        }
    }
    let scale = fd.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let objective_error =
        free.iter().zip(&fd).map(|(&j, f)| (base.gradient[j] - f).abs()).fold(0.0, f64::max) / scale;

    let constraint_error = match &problem.nonlinear {
        None => 0.0,
        Some(g) => {
            let jac = g.jacobian(point);
            let scale = jac_fd.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut worst: f64 = 0.0;
            for (c, &j) in free.iter().enumerate() {
                for i in 0..g.len() {
                    worst = worst.max((jac[[i, j]] - jac_fd[c][i]).abs());
                }
            }
            worst / scale
        }
    };
    Ok(AuditReport { objective_error, constraint_error })
}
