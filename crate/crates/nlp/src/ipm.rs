//! Feasible primal-dual interior-point iteration for `min f(x)` s.t. `c(x) > 0`.
//!
//! Newton steps on the perturbed KKT system
//! `(W + Jᵀ Z C⁻¹ J) dx = -(∇f - μ Jᵀ C⁻¹ e)` with `W = ∇²f - Σ z_i ∇²c_i`,
//! inertia-corrected by a diagonal shift until the matrix factors. The
//! barrier parameter follows a predictor (affine-scaling) estimate and drops
//! back to a monotone schedule whenever the line search struggles. Iterates
//! stay strictly feasible, so the barrier merit is well defined throughout.

use ndarray::{Array1, Array2};
use ndarray_linalg::{FactorizeC, SolveC, UPLO};

use crate::problem::EvalError;
use crate::report::IterationRecord;

pub(crate) struct ObjEval {
    pub value: f64,
    pub gradient: Array1<f64>,
    pub hessian: Option<Array2<f64>>,
}

/// Scaled, reduced problem seen by the iteration.
pub(crate) trait Model {
    fn dim(&self) -> usize;
    fn rows(&self) -> usize;
    fn has_hessian(&self) -> bool;
    fn objective(&self, x: &[f64], want_hessian: bool) -> Result<ObjEval, EvalError>;
    fn constraints(&self, x: &[f64]) -> Array1<f64>;
    fn jacobian(&self, x: &[f64]) -> Array2<f64>;
    /// `Σ z_i ∇²c_i`, or `None` when every row is linear.
    fn constraint_hessian(&self, x: &[f64], z: &[f64]) -> Option<Array2<f64>>;
    /// Value and violation as reported to the user.
    fn report_value(&self, scaled: f64) -> f64;
    fn report_violation(&self, x: &[f64], c: &Array1<f64>) -> f64;
    /// KKT residual in user units from scaled dual residual and complementarity.
    fn report_kkt(&self, dual: &Array1<f64>, comp: f64) -> f64;
}

pub(crate) struct Params {
    pub max_iter: usize,
    pub tol: f64,
    pub mu_init: f64,
    pub mu_min: f64,
    pub phase: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Termination {
    Converged,
    Stopped,
    MaxIter,
    Stalled,
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub kkt: f64,
    pub iterations: usize,
    pub termination: Termination,
}

const KAPPA_SIGMA: f64 = 1e10;
const ARMIJO: f64 = 1e-4;
const BLOCKED: f64 = 0.9;
const EXTRAPOLATION: f64 = 1e4;
/// Blocked predictor steps after which the predictor is abandoned.
const MAX_BLOCKED: usize = 3;
/// Consecutive heavily backtracked steps without merit progress before
/// giving up; noisy objectives otherwise creep along on the Armijo slack.
const MAX_IDLE: usize = 2;
const SHORT_STEP: f64 = 1e-3;

fn barrier(value: f64, c: &Array1<f64>, mu: f64) -> f64 {
    value - mu * c.iter().map(|ci| ci.ln()).sum::<f64>()
}

fn inf_norm(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest `α <= 1` with `v + α dv >= (1 - τ) v` componentwise.
fn fraction_to_boundary(v: &Array1<f64>, dv: &Array1<f64>, tau: f64) -> f64 {
    longest_step(v, dv, tau, 1.0)
}

fn longest_step(v: &Array1<f64>, dv: &Array1<f64>, tau: f64, cap: f64) -> f64 {
    v.iter().zip(dv).filter(|(_, d)| **d < 0.0).map(|(vi, d)| -tau * vi / d).fold(cap, f64::min)
}

struct Factor {
    factor: ndarray_linalg::cholesky::CholeskyFactorized<ndarray::OwnedRepr<f64>>,
    delta: f64,
}

/// Factors `k + δ I`, growing `δ` from the last successful value until the
/// matrix is numerically positive definite.
fn factor_shifted(k: &Array2<f64>, delta_last: f64, force: f64) -> Option<Factor> {
    let n = k.nrows();
    let diag_scale = (0..n).map(|i| k[[i, i]].abs()).fold(1e-300, f64::max);
    let mut delta = force;
    if delta == 0.0 {
        if let Ok(factor) = k.factorizec(UPLO::Lower) {
            if pd_enough(&factor, diag_scale) {
                return Some(Factor { factor, delta: 0.0 });
            }
        }
        delta = if delta_last > 0.0 { (delta_last / 3.0).max(1e-20) } else { 1e-8 * diag_scale.max(1.0) };
    }
    for _ in 0..80 {
        let mut shifted = k.clone();
        for i in 0..n {
            shifted[[i, i]] += delta;
        }
        if let Ok(factor) = shifted.factorizec(UPLO::Lower) {
            if pd_enough(&factor, diag_scale) {
                return Some(Factor { factor, delta });
            }
        }
        delta *= 8.0;
        if !delta.is_finite() {
            break;
        }
    }
    None
}

/// Whether the Lagrangian Hessian at the start is positive semidefinite.
fn convex_at(model: &dyn Model, x: &[f64], obj: &ObjEval, z: &Array1<f64>) -> bool {
    let n = model.dim();
    let mut w = obj.hessian.clone().unwrap_or_else(|| Array2::zeros((n, n)));
    if let Some(hc) = model.constraint_hessian(x, z.as_slice().expect("contiguous")) {
        w -= &hc;
    }
    let scale = (0..n).map(|i| w[[i, i]].abs()).fold(1.0f64, f64::max);
    for i in 0..n {
        w[[i, i]] += 1e-10 * scale;
    }
    w.factorizec(UPLO::Lower).is_ok_and(|f| (0..n).all(|i| f.factor[[i, i]].is_finite() && f.factor[[i, i]] > 0.0))
}

/// Rejects factorizations whose pivots signal near-singularity.
fn pd_enough(f: &ndarray_linalg::cholesky::CholeskyFactorized<ndarray::OwnedRepr<f64>>, scale: f64) -> bool {
    let n = f.factor.nrows();
    (0..n).all(|i| {
        let d = f.factor[[i, i]];
        d.is_finite() && d * d > 1e-15 * scale
    })
}

fn bfgs_update(b: &mut Array2<f64>, s: &Array1<f64>, y: &Array1<f64>, first: bool) {
    let ss = s.dot(s);
    if ss < 1e-300 {
        return;
    }
    if first {
        let sy = s.dot(y);
        let yy = y.dot(y);
        if sy > 0.0 {
            b.fill(0.0);
            b.diag_mut().fill(yy / sy);
        }
    }
    let bs = b.dot(s);
    let sbs = s.dot(&bs);
    let sy = s.dot(y);
    // Powell damping keeps the update positive definite.
    let theta = if sy >= 0.2 * sbs { 1.0 } else { 0.8 * sbs / (sbs - sy) };
    let r = y * theta + &bs * (1.0 - theta);
    let sr = s.dot(&r);
    if sr <= 1e-300 || sbs <= 1e-300 {
        return;
    }
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            b[[i, j]] += r[i] * r[j] / sr - bs[i] * bs[j] / sbs;
        }
    }
}

/// Early exit checked before every iteration.
pub(crate) type StopRule<'a> = &'a dyn Fn(&[f64]) -> bool;

pub(crate) fn interior_point(
    model: &dyn Model,
    x0: &[f64],
    params: &Params,
    stop: Option<StopRule<'_>>,
    sink: &mut dyn FnMut(&IterationRecord),
) -> Result<Outcome, EvalError> {
    let n = model.dim();
    let m = model.rows();
    let use_hessian = model.has_hessian();
    let mut x = Array1::from(x0.to_vec());
    let mut c = model.constraints(x0);
    debug_assert!(c.iter().all(|ci| *ci > 0.0));
    let mut obj = model.objective(x0, use_hessian)?;
    let mut mu = params.mu_init;
    let mut z: Array1<f64> = c.mapv(|ci| mu / ci);
    let mut bfgs = Array2::<f64>::eye(n);
    let mut bfgs_first = true;
    let mut delta_last = 0.0;
    // the predictor-driven target is reserved for locally convex problems
    let convex = !use_hessian || convex_at(model, x0, &obj, &z);
    let mut monotone = !convex;
    if convex {
        // the predictor recovers quickly from a small start; a loose barrier only slows it
        mu *= 0.1;
        z *= 0.1;
    }
    let mut stall_count = 0;
    let mut idle = 0;
    // a predictor that keeps getting blocked would cycle with the monotone
    // fallback; after a few failures the monotone schedule finishes alone
    let mut blocked = 0;
    let mut kkt;

    for it in 0..params.max_iter {
        let xs = x.as_slice().expect("contiguous");
        let jac = if m > 0 { model.jacobian(xs) } else { Array2::zeros((0, n)) };
        let dual = &obj.gradient - &jac.t().dot(&z);
        let comp = &c * &z;
        let comp_max = comp.iter().fold(0.0f64, |a, b| a.max(*b));
        kkt = model.report_kkt(&dual, comp_max);
        if let Some(stop) = stop {
            if stop(xs) {
                return Ok(Outcome { x: x.to_vec(), z: z.to_vec(), kkt, iterations: it, termination: Termination::Stopped });
            }
        }
        if kkt <= params.tol {
            return Ok(Outcome { x: x.to_vec(), z: z.to_vec(), kkt, iterations: it, termination: Termination::Converged });
        }

        if monotone {
            let centrality = comp.iter().fold(0.0f64, |a, ci| a.max((ci - mu).abs()));
            // solved means stationary with positive curvature: a saddle of the
            // barrier problem must be left before the barrier is tightened
            if inf_norm(&dual).max(centrality) <= 10.0 * mu && delta_last == 0.0 {
                // shrink the target, let the predictor try again
                mu = params.mu_min.max((0.2 * mu).min(mu.powf(1.5)));
                monotone = !convex || blocked >= MAX_BLOCKED;
            }
        }

        // W + Jᵀ Σ J
        let mut w = if use_hessian {
            obj.hessian.clone().unwrap_or_else(|| Array2::zeros((n, n)))
        } else {
            bfgs.clone()
        };
        if let Some(hc) = model.constraint_hessian(xs, z.as_slice().unwrap()) {
            w -= &hc;
        }
        let sigma = &z / &c;
        let mut sj = jac.clone();
        for (mut row, s) in sj.rows_mut().into_iter().zip(&sigma) {
            row *= *s;
        }
        let k = w + jac.t().dot(&sj);
        let inv_c = c.mapv(|ci| 1.0 / ci);
        let avg_before = c.dot(&z) / m.max(1) as f64;
        let jt_inv_c = jac.t().dot(&inv_c);

        let mut force = 0.0;
        let mut accepted = None;
        let mut backtrack = 1.0;
        for attempt in 0..4 {
            let Some(fac) = factor_shifted(&k, delta_last, force) else { break };

            // the predictor is only trusted on locally convex steps
            let free = !monotone && fac.delta == 0.0;
            let mu_step = if !free {
                mu
            } else {
                // predictor: pure Newton step on the unperturbed system
                let dx_aff = fac.factor.solvec(&(-&obj.gradient)).expect("factored solve");
                let jdx = jac.dot(&dx_aff);
                let dz_aff = -&z - &(&sigma * &jdx);
                let ap = fraction_to_boundary(&c, &jdx, 1.0);
                let ad = fraction_to_boundary(&z, &dz_aff, 1.0);
                let avg = c.dot(&z) / m.max(1) as f64;
                let aff = (&c + &(&jdx * ap)).dot(&(&z + &(&dz_aff * ad))) / m.max(1) as f64;
                let mut sig = if avg > 0.0 { (aff / avg).clamp(0.0, 1.0).powi(3) } else { 0.0 };
                // a blocked affine step says little about the target; recentre instead
                if ap < BLOCKED {
                    sig = sig.max(0.1);
                }
                // far from stationarity the target must not collapse onto the boundary
                let d = inf_norm(&dual);
                (sig * avg).max((0.1 * avg).min(d * d)).max(params.mu_min)
            };
            let rhs = -&obj.gradient + &(&jt_inv_c * mu_step);
            let dx = fac.factor.solvec(&rhs).expect("factored solve");
            let jdx = jac.dot(&dx);
            let dz = c.mapv(|ci| mu_step / ci) - &z - &(&sigma * &jdx);
            let tau = (1.0 - mu_step).max(0.99);
            // under negative curvature the shifted step is short; allow extrapolation
            let cap = if fac.delta > 0.0 { EXTRAPOLATION } else { 1.0 };
            let alpha_max = longest_step(&c, &jdx, tau, cap);
            let alpha_z = fraction_to_boundary(&z, &dz, tau);
            let slope = -rhs.dot(&dx);
            let merit0 = barrier(obj.value, &c, mu_step);

            let mut alpha = alpha_max;
            let mut found = None;
            if slope < 0.0 {
                for _ in 0..40 {
                    let xt = &x + &(&dx * alpha);
                    let xts = xt.as_slice().unwrap();
                    let ct = model.constraints(xts);
                    if ct.iter().all(|v| *v > 0.0 && v.is_finite()) {
                        if let Ok(ot) = model.objective(xts, use_hessian) {
                            let merit = barrier(ot.value, &ct, mu_step);
                            let slack = 1e-13 * merit0.abs().max(1.0);
                            if merit.is_finite() && merit <= merit0 + ARMIJO * alpha * slope + slack {
                                backtrack = alpha / alpha_max;
                                found = Some((xt, ct, ot, merit));
                                break;
                            }
                        }
                    }
                    alpha *= 0.5;
                    if alpha < 1e-14 * alpha_max.max(1e-300) {
                        break;
                    }
                }
            }
            if let Some((xt, ct, ot, merit)) = found {
                accepted = Some((xt, ct, ot, merit0, merit, alpha, alpha_z, dx, dz, mu_step, fac.delta, free));
                delta_last = fac.delta;
                break;
            }
            // no acceptable step: regularize harder, then fall back to the monotone schedule
            force = if fac.delta > 0.0 { fac.delta * 100.0 } else { 1e-4 * (1.0 + inf_norm(&obj.gradient)) };
            if attempt >= 1 && !monotone {
                monotone = true;
                mu = (c.dot(&z) / m.max(1) as f64).max(params.mu_min);
            }
        }

        let Some((xt, ct, ot, merit0, merit, alpha, alpha_z, dx, dz, mu_step, delta, free)) = accepted else {
            return Ok(Outcome { x: x.to_vec(), z: z.to_vec(), kkt, iterations: it, termination: Termination::Stalled });
        };

        let step = &dx * alpha;
        let step_norm = inf_norm(&step);
        if !use_hessian {
            let y = &ot.gradient - &obj.gradient;
            bfgs_update(&mut bfgs, &step, &y, bfgs_first);
            bfgs_first = false;
        }
        let mut zn = &z + &(&dz * alpha_z);
        for (zi, ci) in zn.iter_mut().zip(&ct) {
            let lo = mu_step / (KAPPA_SIGMA * ci);
            let hi = KAPPA_SIGMA * mu_step / ci;
            *zi = zi.clamp(lo, hi);
        }
        x = xt;
        c = ct;
        obj = ot;
        z = zn;
        if free {
            mu = mu_step;
            if alpha < BLOCKED {
                // the predicted target was not reachable: follow the monotone path
                monotone = true;
                mu = avg_before.max(params.mu_min);
                blocked += 1;
            }
        } else {
            monotone = true;
            mu = mu_step;
        }

        stall_count = if step_norm <= 1e-15 * (1.0 + inf_norm(&x)) { stall_count + 1 } else { 0 };
        let progress = merit0 - merit;
        idle = if backtrack < SHORT_STEP && progress <= 1e-10 * merit0.abs().max(1.0) { idle + 1 } else { 0 };
        let xs = x.as_slice().unwrap();
        sink(&IterationRecord {
            iteration: it + 1,
            phase: params.phase,
            value: model.report_value(obj.value),
            violation: model.report_violation(xs, &c),
            step_norm,
            alpha,
            mu: mu_step,
            merit_before: merit0,
            merit_after: merit,
            kkt,
            regularization: delta,
        });
        if (stall_count >= 5 && mu_step <= params.mu_min) || idle >= MAX_IDLE {
            return Ok(Outcome { x: x.to_vec(), z: z.to_vec(), kkt, iterations: it + 1, termination: Termination::Stalled });
        }
    }

    // final KKT check at the last iterate
    let xs = x.as_slice().unwrap();
    let jac = if m > 0 { model.jacobian(xs) } else { Array2::zeros((0, n)) };
    let dual = &obj.gradient - &jac.t().dot(&z);
    let comp_max = (&c * &z).iter().fold(0.0f64, |a, b| a.max(*b));
    kkt = model.report_kkt(&dual, comp_max);
    let termination = if kkt <= params.tol { Termination::Converged } else { Termination::MaxIter };
    Ok(Outcome { x: x.to_vec(), z: z.to_vec(), kkt, iterations: params.max_iter, termination })
}
