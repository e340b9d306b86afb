use ndarray::Array1;

use crate::audit::audit_gradient_with_step;
use crate::ipm::{interior_point, Model, Params, Termination};
use crate::model::{Phase1, Scaled};
use crate::problem::NlpProblem;
use crate::report::{IterationRecord, Multipliers, SolveOptions, SolveReport, Status};
use crate::SolveError;

/// Phase 1 stops once every scaled row clears this margin.
const INTERIOR_MARGIN: f64 = 1e-3;

pub fn solve(problem: &NlpProblem, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    solve_with_sink(problem, opts, &mut |_| {})
}

/// As [`solve`], streaming every accepted step to `sink`.
pub fn solve_with_sink(
    problem: &NlpProblem,
    opts: &SolveOptions,
    sink: &mut dyn FnMut(&IterationRecord),
) -> Result<SolveReport, SolveError> {
    problem.validate()?;
    let model = Scaled::new(problem, opts.force_bfgs)?;
    if opts.audit {
        let audit = audit_gradient_with_step(problem, &problem.start, opts.audit_step)?;
        if audit.max_error() > opts.audit_tol {
            return Err(SolveError::AuditFailure {
                objective: audit.objective_error,
                constraints: audit.constraint_error,
                tol: opts.audit_tol,
            });
        }
    }

    let mut log = Vec::new();
    let mut record = |r: &IterationRecord| {
        log.push(r.clone());
        sink(r);
    };
    let n = model.dim();
    let x0 = model.internal(&problem.start);
    let report = |x: &[f64], z: Option<&[f64]>, kkt: f64, iterations: usize, status: Status, log: Vec<IterationRecord>| {
        let full = model.full(x);
        let value = problem.objective.evaluate(&full, false).map(|g| g.value).unwrap_or(f64::NAN);
        let (linear, nonlinear) = match z {
            Some(z) => model.user_multipliers(z),
            None => model.user_multipliers(&vec![0.0; model.rows()]),
        };
        SolveReport {
            max_violation: problem.max_violation(&full),
            final_coeffs: full,
            value,
            kkt_residual: kkt,
            iterations,
            status,
            multipliers: Multipliers { linear, nonlinear },
            log,
            seed: opts.seed,
        }
    };

    if model.fixed_row_violation() > opts.tol_feas {
        return Ok(report(&x0, None, f64::INFINITY, 0, Status::Infeasible, log));
    }

    let mut iterations = 0;
    let mut start = x0.clone();
    let c0 = model.constraints(&x0);
    if c0.iter().any(|c| c.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        let cmin = c0.iter().fold(f64::INFINITY, |m, c| m.min(*c));
        let phase1 = Phase1 { inner: &model, anchor: x0.clone(), rho: 1e-4 };
        let mut y0 = x0.clone();
        y0.push(cmin.max(-1e300).abs() + 1.0);
        let stop = |y: &[f64]| y[n] < -INTERIOR_MARGIN && model.objective(&y[..n], false).is_ok();
        let p1 = Params { max_iter: opts.max_iter, tol: opts.tol_feas, mu_init: opts.mu_init, mu_min: 1e-12, phase: 1 };
        let out = interior_point(&phase1, &y0, &p1, Some(&stop), &mut record)
            .map_err(|e| SolveError::Evaluation(e.to_string()))?;
        iterations += out.iterations;
        let candidate = &out.x[..n];
        let interior = model.constraints(candidate).iter().all(|c| *c > 0.0);
        if !interior || model.objective(candidate, false).is_err() {
            return Ok(report(candidate, None, f64::INFINITY, iterations, Status::Infeasible, log));
        }
        start = candidate.to_vec();
    }

    let params = Params {
        max_iter: opts.max_iter.saturating_sub(iterations).max(1),
        tol: opts.tol_kkt,
        mu_init: opts.mu_init,
        mu_min: 0.1 * opts.tol_kkt * model.obj_scale,
        phase: 2,
    };
    let out = interior_point(&model, &start, &params, None, &mut record)
        .map_err(|e| SolveError::Evaluation(format!("objective at start: {e}")))?;
    iterations += out.iterations;
    let full = model.full(&out.x);
    let viol = problem.max_violation(&full);
    let status = match out.termination {
        Termination::Converged if viol <= opts.tol_feas => Status::Converged,
        Termination::Converged | Termination::Stalled | Termination::Stopped => Status::Stalled,
        Termination::MaxIter => Status::MaxIter,
    };
    Ok(report(&out.x, Some(&out.z), out.kkt, iterations, status, log))
}

/// KKT residual of a report recomputed from scratch: `max(|∇f - Σ λ ∇c|∞,
/// max |λ_i c_i|)` on the free coefficients.
pub fn recompute_kkt(problem: &NlpProblem, report: &SolveReport) -> f64 {
    let pattern = &problem.pattern;
    let x = &report.final_coeffs;
    let g = match problem.objective.evaluate(x, false) {
        Ok(g) => g.gradient,
        Err(_) => return f64::INFINITY,
    };
    let mut dual = Array1::from(pattern.free.iter().map(|&j| g[j]).collect::<Vec<_>>());
    let lin = &problem.linear;
    let vals = lin.values(x);
    let mut comp: f64 = 0.0;
    for (i, &lam) in report.multipliers.linear.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for (c, &j) in pattern.free.iter().enumerate() {
            dual[c] -= lam * lin.matrix[[i, j]];
        }
        let slack = if lam > 0.0 { vals[i] - lin.lower[i] } else { lin.upper[i] - vals[i] };
        comp = comp.max((lam * slack).abs());
    }
    if let Some(gc) = &problem.nonlinear {
        let jac = gc.jacobian(x);
        let r = gc.residual(x);
        for (i, &lam) in report.multipliers.nonlinear.iter().enumerate() {
            for (c, &j) in pattern.free.iter().enumerate() {
                dual[c] -= lam * jac[[i, j]];
            }
            comp = comp.max((lam * r[i]).abs());
        }
    }
    dual.iter().fold(comp, |m, v| m.max(v.abs()))
}
