use std::f64::consts::PI;

use rayon::prelude::*;

use crate::body::Body;
use crate::discretization::Discretization;
use crate::eigenfunction::Eigenfunction;
use crate::{MfsConfig, MfsError};

/// Minimum refinement stops at this relative bracket width.
pub const REFINE_WIDTH: f64 = 1e-8;

/// Relative disagreement with the Weyl count that raises `missed`.
pub const WEYL_TOLERANCE: f64 = 0.2;

/// Minima closer than this (relative) are one cluster.
const CLUSTER_WIDTH: f64 = 1e-5;

const MAX_MULTIPLICITY: usize = 8;

/// First zero of `J₀`.
const J01: f64 = 2.404_825_557_695_773;

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: f64,
    /// `σ₁` at the refined minimum.
    pub sigma1: f64,
    /// Number of singular values of `Q₁` counted as zero at `lambda`.
    pub multiplicity: usize,
    /// Distance to the nearest other located eigenvalue (0 inside a cluster).
    pub gap: f64,
    pub eigenfunction: Eigenfunction,
}

impl EigenResult {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1 && self.gap > 1e-6 * self.lambda
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending, repeated by multiplicity, at most `k_max` entries.
    pub eigenvalues: Vec<EigenResult>,
    pub bracket: (f64, f64),
    /// Eigenvalues located in the whole bracket, with multiplicity.
    pub found: usize,
    /// Two-term Weyl count at the top of the bracket.
    pub weyl: f64,
    /// The located count disagrees with the Weyl estimate.
    pub missed: bool,
    /// Scan samples `(λ, σ₁)`.
    pub scan: Vec<(f64, f64)>,
}

/// Two-term Weyl counting function `N(λ)`.
pub fn weyl_count(body: &Body, lambda: f64) -> Result<f64, MfsError> {
    let v = body.measure()?;
    let s = body.boundary_measure();
    Ok(if body.dim() == 2 {
        v * lambda / (4.0 * PI) - s * lambda.sqrt() / (4.0 * PI)
    } else {
        v * lambda.powf(1.5) / (6.0 * PI * PI) - s * lambda / (16.0 * PI)
    })
}

/// `λ` at which the Weyl count reaches `k`.
pub fn weyl_eigenvalue(body: &Body, k: usize) -> Result<f64, MfsError> {
    let target = k as f64;
    let mut hi = faber_krahn(body)?;
    while weyl_count(body, hi)? < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if weyl_count(body, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Faber–Krahn lower bound on `λ₁`: the ball of equal measure.
pub fn faber_krahn(body: &Body) -> Result<f64, MfsError> {
    let v = body.measure()?;
    if !(v > 0.0) {
        return Err(MfsError::InvalidConfig(format!("body has non-positive measure {v}")));
    }
    Ok(if body.dim() == 2 {
        PI * J01 * J01 / v
    } else {
        let r = (3.0 * v / (4.0 * PI)).cbrt();
        PI * PI / (r * r)
    })
}

/// Scan bracket reaching the first `k_max` eigenvalues.
pub fn default_bracket(body: &Body, k_max: usize) -> Result<(f64, f64), MfsError> {
    let lo = 0.9 * faber_krahn(body)?;
    let hi = (1.3 * weyl_eigenvalue(body, k_max.max(1))?).max(1.5 * lo);
    Ok((lo, hi))
}

/// Scan grid, uniform in `k = √λ`.
pub fn scan_grid(body: &Body, bracket: (f64, f64), density: f64) -> Result<Vec<f64>, MfsError> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(MfsError::InvalidConfig(format!("bad eigenvalue bracket [{lo}, {hi}]")));
    }
    let (k0, k1) = (lo.sqrt(), hi.sqrt());
    let v = body.measure()?;
    let dn_dk = if body.dim() == 2 { v * k1 / (2.0 * PI) } else { v * k1 * k1 / (2.0 * PI * PI) };
    let steps = (((k1 - k0) * dn_dk * density).ceil() as usize).max(24);
    Ok((0..=steps).map(|i| (k0 + (k1 - k0) * i as f64 / steps as f64).powi(2)).collect())
}

/// Minimum of `σ₁` on `[a, b]`, refined until the bracket is narrower
/// than [`REFINE_WIDTH`] relative.
pub fn refine_minimum(disc: &Discretization, a: f64, b: f64) -> Result<(f64, f64), MfsError> {
    let m = 0.5 * (a + b);
    let fm = disc.sigma1(m)?;
    refine_from(disc, a, (m, fm), b)
}

/// Brent's method on `σ₁²` from an interior point `x` with `σ₁(x)` known.
/// Near an eigenvalue `σ₁ ≈ √(σ₀² + s²(λ − λ*)²)`, so `σ₁²` is close to a
/// parabola and the interpolation steps converge in a handful of solves.
fn refine_from(disc: &Discretization, mut a: f64, (x0, s0): (f64, f64), mut b: f64) -> Result<(f64, f64), MfsError> {
    const CGOLD: f64 = 0.381_966_011_250_105;
    let tol = 0.25 * REFINE_WIDTH;
    let f = |l: f64| disc.sigma1(l).map(|s| s * s);
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (s0 * s0, s0 * s0, s0 * s0);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, fx.sqrt()))
}

struct Located {
    lambda: f64,
    sigma1: f64,
    multiplicity: usize,
    functions: Vec<Eigenfunction>,
}

fn classify(disc: &Discretization, lambda: f64, cfg: &MfsConfig) -> Result<Located, MfsError> {
    let modes = disc.modes(lambda, MAX_MULTIPLICITY.min(disc.n_sources()))?;
    let s1 = modes.sigmas[0];
    // away from eigenvalues σ is O(0.1..1); anything below the acceptance
    // threshold is a (near-)degenerate partner
    let multiplicity = modes.sigmas.iter().take_while(|&&s| s <= cfg.accept).count().max(1);
    let functions = modes.functions.into_iter().take(multiplicity).collect();
    Ok(Located { lambda, sigma1: s1, multiplicity, functions })
}

/// Eigenvalues at the accepted local minima of `σ₁` over a scan of `bracket`.
pub fn locate(disc: &Discretization, grid: &[f64], cfg: &MfsConfig) -> Result<(Vec<EigenResult>, Vec<(f64, f64)>), MfsError> {
    let sig: Vec<f64> = grid.par_iter().map(|&l| disc.sigma1(l)).collect::<Result<_, _>>()?;
    let scan: Vec<(f64, f64)> = grid.iter().cloned().zip(sig.iter().cloned()).collect();
    let mut found: Vec<Located> = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if !(sig[i] <= sig[i - 1] && sig[i] < sig[i + 1]) {
            continue;
        }
        let (lambda, s) = refine_from(disc, grid[i - 1], (grid[i], sig[i]), grid[i + 1])?;
        if s > cfg.accept {
            continue;
        }
        let loc = classify(disc, lambda, cfg)?;
        match found.last_mut() {
            Some(prev) if (lambda - prev.lambda).abs() <= CLUSTER_WIDTH * lambda => {
                if loc.multiplicity > prev.multiplicity {
                    *prev = loc;
                }
            }
            _ => found.push(loc),
        }
    }
    let mut out = Vec::new();
    for (i, loc) in found.iter().enumerate() {
        let below = i.checked_sub(1).map_or(f64::INFINITY, |j| loc.lambda - found[j].lambda);
        let above = found.get(i + 1).map_or(f64::INFINITY, |n| n.lambda - loc.lambda);
        let gap = if loc.multiplicity > 1 { 0.0 } else { below.min(above) };
        for f in &loc.functions {
            out.push(EigenResult {
                lambda: loc.lambda,
                sigma1: loc.sigma1,
                multiplicity: loc.multiplicity,
                gap,
                eigenfunction: f.clone(),
            });
        }
    }
    Ok((out, scan))
}

/// First `k_max` Dirichlet eigenvalues in `bracket` (default: Faber–Krahn
/// to a Weyl estimate), with multiplicity.
pub fn find_eigenvalues(
    body: &Body,
    bracket: Option<(f64, f64)>,
    k_max: usize,
    cfg: &MfsConfig,
) -> Result<Spectrum, MfsError> {
    let bracket = match bracket {
        Some(b) => b,
        None => default_bracket(body, k_max)?,
    };
    let grid = scan_grid(body, bracket, cfg.scan_density)?;
    let disc = Discretization::new(body, cfg)?;
    let (mut all, scan) = locate(&disc, &grid, cfg)?;
    let found = all.len();
    let weyl = weyl_count(body, bracket.1)?.max(0.0);
    // integer counts and degenerate clusters make small counts coarse
    let missed = (found as f64 - weyl).abs() > (WEYL_TOLERANCE * weyl).max(2.0);
    all.truncate(k_max);
    Ok(Spectrum { eigenvalues: all, bracket, found, weyl, missed, scan })
}
