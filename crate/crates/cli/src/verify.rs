//! Invariant and oracle suites behind `supportshape verify`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supportshape_core::constraints::{constant_width_pattern, convexity_2d, convexity_3d, NonlinearConstraints};
use supportshape_core::functionals::{
    area_2d, area_3d, energy, perimeter_2d, volume_cw_3d, GradedValue, VolumeFunctional,
};
use supportshape_core::harmonics::{sph_index, sph_lm, sph_len, HarmonicGrid};
use supportshape_core::{
    make_sphere_grid, Direction, FourierSupport2D, Space, SphereGrid, SphericalSupport3D, DEFAULT_POLE_MARGIN,
};
use supportshape_mfs::{find_eigenvalues, Body, MfsConfig};
use supportshape_nlp::{audit_gradient, solve};
use supportshape_problems::{build, loop_mfs_config, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    /// Closed-form and quadrature identities of the geometric functionals.
    Geometry,
    /// Analytic derivatives against central differences.
    Gradients,
    /// Eigenvalue solver against known spectra.
    Spectra,
    /// Bit-identical solver reruns.
    Solver,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Geometry, Suite::Gradients, Suite::Spectra, Suite::Solver];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Gradients => "gradients",
            Suite::Spectra => "spectra",
            Suite::Solver => "solver",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Empty means every suite.
    pub suites: Vec<Suite>,
    /// Negative control: perturb the coefficients handed to the quantities
    /// under test (not to their oracles), so the checks must fail.
    pub corrupt: bool,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    /// Observed error; infinite when the check could not be evaluated.
    pub error: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_finite() && self.error <= self.tolerance
    }
}

fn check(suite: Suite, name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64, String>) -> Check {
    let (error, note) = match f() {
        Ok(e) if e.is_nan() => (f64::INFINITY, Some("NaN".to_string())),
        Ok(e) => (e, None),
        Err(msg) => (f64::INFINITY, Some(msg)),
    };
    Check { suite, name: name.to_string(), error, tolerance, note }
}

/// Applies the negative-control perturbation when enabled.
#[derive(Debug, Clone, Copy)]
struct Tamper(bool);

impl Tamper {
    fn coeffs(self, c: &[f64]) -> Vec<f64> {
        c.iter().enumerate().map(|(i, v)| if self.0 { v + 1e-2 * (1.0 + (i % 3) as f64) } else { *v }).collect()
    }

    fn scalar(self, x: f64) -> f64 {
        if self.0 {
            x * (1.0 + 1e-2)
        } else {
            x
        }
    }
}

pub fn run_suites(opts: &VerifyOptions) -> Vec<Check> {
    let suites = if opts.suites.is_empty() { Suite::ALL.to_vec() } else { opts.suites.clone() };
    let t = Tamper(opts.corrupt);
    let mut out = Vec::new();
    for s in Suite::ALL.into_iter().filter(|s| suites.contains(s)) {
        out.extend(match s {
            Suite::Geometry => geometry(t),
            Suite::Gradients => gradients(t),
            Suite::Spectra => spectra(t),
            Suite::Solver => solver(t),
        });
    }
    out
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

pub fn table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let _ = write!(
            s,
            "{} {:<9} {:<width$}  error {:.3e}  tol {:.1e}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.suite.name(),
            c.name,
            c.error,
            c.tolerance
        );
        if let Some(n) = &c.note {
            let _ = write!(s, "  ({n})");
        }
        s.push('\n');
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
    s
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn near_ball(degree: usize, rng: &mut ChaCha8Rng, amp: f64) -> SphericalSupport3D {
    let mut p = SphericalSupport3D::ball(1.0, degree);
    for i in 1..p.coeffs().len() {
        let l = sph_lm(i).0 as f64;
        p.coeffs_mut()[i] = amp * rng.random_range(-1.0..1.0) / (1.0 + l).powi(2);
    }
    p
}

fn near_disk(order: usize, rng: &mut ChaCha8Rng, amp: f64) -> Vec<f64> {
    let mut c = FourierSupport2D::disk(1.0, order).to_coeffs();
    for (i, v) in c.iter_mut().enumerate().skip(1) {
        let k = supportshape_core::fourier::frequency_of(order, i) as f64;
        *v = amp * rng.random_range(-1.0..1.0) / (1.0 + k).powi(2);
    }
    c
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let t: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [s * t.cos(), s * t.sin(), z]
}

fn sph(c: &[f64]) -> Result<SphericalSupport3D, String> {
    SphericalSupport3D::from_coeffs(c).map_err(|e| e.to_string())
}

fn fourier(c: &[f64]) -> Result<FourierSupport2D, String> {
    FourierSupport2D::from_coeffs(c).map_err(|e| e.to_string())
}

fn geometry(t: Tamper) -> Vec<Check> {
    use Suite::Geometry as G;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ball_p = near_ball(5, &mut rng, 0.5);
    let mut checks = vec![
        check(G, "ball area 4πr²", 1e-12, || {
            let r = 0.7;
            let p = sph(&t.coeffs(SphericalSupport3D::ball(r, 4).coeffs()))?;
            Ok(rel(area_3d(&p).value, 4.0 * PI * r * r))
        }),
        check(G, "ball volume 4πr³/3", 1e-10, || {
            let r = 0.7;
            let grid = SphereGrid::quadrature_for_degree(12).map_err(|e| e.to_string())?;
            let vf = VolumeFunctional::new(4, &grid);
            let c = t.coeffs(SphericalSupport3D::ball(r, 4).coeffs());
            let v = vf.evaluate(&c, false).map_err(|e| e.to_string())?.value;
            let v_cw = volume_cw_3d(&sph(&c)?, 2.0 * r).value;
            Ok(rel(v, 4.0 * PI * r.powi(3) / 3.0).max(rel(v_cw, 4.0 * PI * r.powi(3) / 3.0)))
        }),
        check(G, "disk area πr² and perimeter 2πr", 1e-12, || {
            let r = 1.3;
            let p = fourier(&t.coeffs(&FourierSupport2D::disk(r, 6).to_coeffs()))?;
            Ok(rel(area_2d(&p).value, PI * r * r).max(rel(perimeter_2d(&p).value, 2.0 * PI * r)))
        }),
        check(G, "area formula vs surface quadrature", 1e-5, || {
            let degree = 5;
            let grid = SphereGrid::quadrature_for_degree(3 * degree + 2).map_err(|e| e.to_string())?;
            let tables = HarmonicGrid::new(degree, &grid);
            let quad: f64 = tables
                .jacobians(ball_p.coeffs())
                .iter()
                .zip(&tables.inv_sin)
                .zip(&grid.weights)
                .map(|((j, s), w)| w * j * s)
                .sum();
            Ok(rel(area_3d(&sph(&t.coeffs(ball_p.coeffs()))?).value, quad))
        }),
        check(G, "constant-width volume formula vs quadrature", 1e-5, || {
            let degree = 5;
            let grid = SphereGrid::quadrature_for_degree(3 * degree + 2).map_err(|e| e.to_string())?;
            let vf = VolumeFunctional::new(degree, &grid);
            let cw = constant_width_pattern(Space::Spherical { degree }, 1.0);
            let reduced: Vec<f64> = cw.free.iter().map(|&i| 0.3 * ball_p.coeffs()[i]).collect();
            let full = cw.expand(&reduced).map_err(|e| e.to_string())?;
            let quad = vf.evaluate(&full, false).map_err(|e| e.to_string())?.value;
            Ok(rel(volume_cw_3d(&sph(&t.coeffs(&full))?, 1.0).value, quad))
        }),
        check(G, "planar area formula vs shoelace", 1e-5, || {
            let mut planar = FourierSupport2D::disk(1.0, 6);
            planar.a[2] = 0.05;
            planar.b[4] = 0.02;
            let m = 20_000;
            let shoelace: f64 = (0..m)
                .map(|i| {
                    let a = planar.boundary_point(2.0 * PI * i as f64 / m as f64);
                    let b = planar.boundary_point(2.0 * PI * (i + 1) as f64 / m as f64);
                    0.5 * (a[0] * b[1] - a[1] * b[0])
                })
                .sum();
            Ok(rel(area_2d(&fourier(&t.coeffs(&planar.to_coeffs()))?).value, shoelace))
        }),
        check(G, "surface Jacobian vs tangent cross product", 1e-5, || {
            let p = sph(&t.coeffs(ball_p.coeffs()))?;
            let h = 1e-5;
            let mut worst: f64 = 0.0;
            for k in 0..40 {
                let phi = -3.0 + 0.15 * k as f64;
                let psi = 0.2 + 0.068 * k as f64;
                let x = |a: f64, b: f64| ball_p.boundary_point(a, b).map_err(|e| e.to_string());
                let (xp, xm, yp, ym) = (x(phi + h, psi)?, x(phi - h, psi)?, x(phi, psi + h)?, x(phi, psi - h)?);
                let u: Vec<f64> = (0..3).map(|c| (xp[c] - xm[c]) / (2.0 * h)).collect();
                let v: Vec<f64> = (0..3).map(|c| (yp[c] - ym[c]) / (2.0 * h)).collect();
                let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                let area = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                let jac = p.surface_jacobian(phi, psi).map_err(|e| e.to_string())?;
                worst = worst.max(rel(jac, area));
            }
            Ok(worst)
        }),
        check(G, "spherical harmonic Gram identity", 1e-7, || {
            let degree = 6;
            let grid = SphereGrid::gauss_product(10, 16, DEFAULT_POLE_MARGIN).map_err(|e| e.to_string())?;
            let h = HarmonicGrid::new(degree, &grid);
            let n = sph_len(degree);
            let mut worst: f64 = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let g: f64 = (0..grid.len()).map(|i| grid.weights[i] * h.y[[i, a]] * h.y[[i, b]]).sum();
                    let want = if a == b { t.scalar(1.0) } else { 0.0 };
                    worst = worst.max((g - want).abs());
                }
            }
            Ok(worst)
        }),
        check(G, "constant width w at 500 random directions", 1e-10, || {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            let mut worst: f64 = 0.0;
            for (space, w) in [(Space::Spherical { degree: 6 }, 1.3), (Space::Planar { order: 15 }, 2.0)] {
                let pat = constant_width_pattern(space, w);
                let reduced: Vec<f64> = (0..pat.free_len()).map(|_| rng.random_range(-0.03..0.03)).collect();
                let full = t.coeffs(&pat.expand(&reduced).map_err(|e| e.to_string())?);
                for _ in 0..500 {
                    let u = match space {
                        Space::Planar { .. } => Direction::Angle(rng.random_range(0.0..2.0 * PI)),
                        Space::Spherical { .. } => Direction::Unit(random_unit(&mut rng)),
                    };
                    let width = space.support_value(&full, u) + space.support_value(&full, u.opposite());
                    worst = worst.max((width - w).abs());
                }
            }
            Ok(worst)
        }),
    ];
    checks.push(check(G, "translation invariance of area, volume, curvature", 1e-10, || {
        let degree = 4;
        let grid = SphereGrid::quadrature_for_degree(3 * degree + 4).map_err(|e| e.to_string())?;
        let vf = VolumeFunctional::new(degree, &grid);
        let con = convexity_3d(degree, &make_sphere_grid(100, DEFAULT_POLE_MARGIN).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = near_ball(degree, &mut rng, 0.3);
        let mut q = p.coeffs().to_vec();
        for m in -1..=1 {
            q[sph_index(1, m)] += 0.2 * (m as f64 + 1.5);
        }
        let q = t.coeffs(&q);
        let vol = |c: &[f64]| vf.evaluate(c, false).map(|g| g.value).map_err(|e| e.to_string());
        let mut worst = (area_3d(&p).value - area_3d(&sph(&q)?).value).abs();
        worst = worst.max((vol(p.coeffs())? - vol(&q)?).abs());
        for (a, b) in con.residual(p.coeffs()).iter().zip(con.residual(&q)) {
            worst = worst.max((a - b).abs());
        }
        // planar: a translation is the degree-1 part
        let order = 8;
        let c = near_disk(order, &mut rng, 0.2);
        let moved = t.coeffs(&fourier(&c)?.translated(0.4, -0.7).to_coeffs());
        let rows = convexity_2d(order, 64).map_err(|e| e.to_string())?;
        worst = worst.max((area_2d(&fourier(&c)?).value - area_2d(&fourier(&moved)?).value).abs());
        let (r0, r1) = (rows.matrix.dot(&ndarray::Array1::from(c.clone())), rows.matrix.dot(&ndarray::Array1::from(moved)));
        worst = worst.max((&r0 - &r1).iter().fold(0.0, |m: f64, v| m.max(v.abs())));
        Ok(worst)
    }));
    checks
}

fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            (f(&xp) - f(&xm)) / (2.0 * h)
        })
        .collect()
}

/// Largest entry error relative to `max(|fd|_∞, 1)`.
fn audit_error(exact: &[f64], fd: &[f64]) -> f64 {
    let scale = fd.iter().map(|v| v.abs()).fold(1.0, f64::max);
    exact.iter().zip(fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

/// Gradient (and Hessian, when present) of `f` against central differences,
/// with the analytic side evaluated at the tampered point.
fn graded_audit(t: Tamper, f: &dyn Fn(&[f64]) -> Result<GradedValue, String>, x: &[f64]) -> Result<f64, String> {
    let g = f(&t.coeffs(x))?;
    let value = |y: &[f64]| f(y).map(|g| g.value).unwrap_or(f64::NAN);
    let mut worst = audit_error(&g.gradient, &fd_gradient(&value, x, 1e-6));
    if let Some(h) = &g.hessian {
        for j in 0..x.len() {
            let col = fd_gradient(&|y: &[f64]| f(y).map(|g| g.gradient[j]).unwrap_or(f64::NAN), x, 1e-5);
            let exact: Vec<f64> = (0..x.len()).map(|i| h[[i, j]]).collect();
            worst = worst.max(audit_error(&exact, &col));
        }
    }
    Ok(worst)
}

fn gradients(t: Tamper) -> Vec<Check> {
    use Suite::Gradients as D;
    const TOL: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let planar = near_disk(6, &mut rng, 0.3);
    let spatial = near_ball(4, &mut rng, 0.3);
    let sc = spatial.coeffs().to_vec();
    let mut checks = vec![
        check(D, "area_2d", TOL, || graded_audit(t, &|x| Ok(area_2d(&fourier(x)?)), &planar)),
        check(D, "perimeter_2d", TOL, || graded_audit(t, &|x| Ok(perimeter_2d(&fourier(x)?)), &planar)),
        check(D, "energy", TOL, || graded_audit(t, &|x| Ok(energy(&sph(x)?)), &sc)),
        check(D, "area_3d", TOL, || graded_audit(t, &|x| Ok(area_3d(&sph(x)?)), &sc)),
        check(D, "volume_cw_3d", TOL, || graded_audit(t, &|x| Ok(volume_cw_3d(&sph(x)?, 2.1)), &sc)),
        check(D, "volume (cubic quadrature form)", TOL, || {
            let grid = SphereGrid::quadrature_for_degree(16).map_err(|e| e.to_string())?;
            let vf = VolumeFunctional::new(4, &grid);
            graded_audit(t, &|x| vf.evaluate(x, true).map_err(|e| e.to_string()), &sc)
        }),
        check(D, "product, quotient and power rules", TOL, || {
            graded_audit(
                t,
                &|x| {
                    let p = fourier(x)?;
                    let (a, l) = (area_2d(&p), perimeter_2d(&p));
                    let q = GradedValue::quotient(&GradedValue::product(&l, &l), &a);
                    Ok(GradedValue::powf(&q, 0.75))
                },
                &planar,
            )
        }),
        check(D, "3D convexity Jacobian", TOL, || {
            let con = convexity_3d(4, &make_sphere_grid(60, DEFAULT_POLE_MARGIN).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let j = con.jacobian(&t.coeffs(&sc));
            let mut worst: f64 = 0.0;
            for i in 0..con.len() {
                let fd = fd_gradient(&|y: &[f64]| con.residual(y)[i], &sc, 1e-6);
                worst = worst.max(audit_error(&j.row(i).to_vec(), &fd));
            }
            Ok(worst)
        }),
    ];
    // every geometric catalog problem at a reduced truncation, through the
    // solver's own audit
    let cases: [(&str, Params); 8] = [
        ("min_area_cw_2d", Params::default().with_degree(12).with_grid(96)),
        ("min_vol_cw_3d", Params::default().with_degree(4).with_grid(100)),
        ("rotor_min", Params::default().with_rotor("tetrahedron").with_grid(100)),
        ("rotor_min", Params::default().with_rotor("triangle").with_degree(12).with_grid(96)),
        ("j_gamma", Params::default().with_degree(12).with_grid(96)),
        ("min_area_width_3d", Params::default().with_degree(4).with_grid(100)),
        ("cheeger_2d", Params::default().with_degree(12).with_grid(96)),
        ("cheeger", Params::default().with_degree(4).with_grid(100)),
    ];
    for (name, params) in cases {
        let label = format!("{name} audit at start{}", params.rotor.as_deref().map(|r| format!(" ({r})")).unwrap_or_default());
        checks.push(check(D, &label, TOL, || {
            let prob = build(name, &params).map_err(|e| e.to_string())?;
            let x = t.coeffs(&prob.nlp.start);
            let mut nlp = prob.nlp.clone();
            nlp.start = x.clone();
            let r = audit_gradient(&nlp, &x).map_err(|e| e.to_string())?;
            Ok(r.objective_error.max(r.constraint_error))
        }));
    }
    checks
}

const J01: f64 = 2.404_825_557_695_773;
const J11: f64 = 3.831_705_970_207_512;
const J21: f64 = 5.135_622_301_840_683;

fn first_eigenvalue(body: &Body, guess: f64, cfg: &MfsConfig) -> Result<f64, String> {
    let s = find_eigenvalues(body, Some((0.9 * guess, 1.1 * guess)), 1, cfg).map_err(|e| e.to_string())?;
    s.eigenvalues.first().map(|e| e.lambda).ok_or_else(|| "no eigenvalue located".to_string())
}

fn spectra(t: Tamper) -> Vec<Check> {
    use Suite::Spectra as S;
    let planar_cfg = loop_mfs_config(2);
    let spatial_cfg = loop_mfs_config(3);
    let disk = |r: f64| {
        let b = Body::disk(r);
        Body::from_coeffs(b.space(), &t.coeffs(&b.coeffs())).map_err(|e| e.to_string())
    };
    let ball = |r: f64| {
        let b = Body::ball(r);
        Body::from_coeffs(b.space(), &t.coeffs(&b.coeffs())).map_err(|e| e.to_string())
    };
    vec![
        check(S, "unit disk λ₁ = 5.7832", 1e-3, || {
            let s = find_eigenvalues(&disk(1.0)?, None, 1, &planar_cfg).map_err(|e| e.to_string())?;
            Ok((s.eigenvalues.first().ok_or("no eigenvalue")?.lambda - 5.7832).abs())
        }),
        check(S, "unit disk λ₁..λ₄ = squared Bessel zeros", 1e-3, || {
            let want = [J01 * J01, J11 * J11, J11 * J11, J21 * J21];
            let s = find_eigenvalues(&disk(1.0)?, None, 4, &planar_cfg).map_err(|e| e.to_string())?;
            if s.eigenvalues.len() < 4 {
                return Err(format!("located {} of 4", s.eigenvalues.len()));
            }
            Ok(s.eigenvalues.iter().zip(want).map(|(e, w)| rel(e.lambda, w)).fold(0.0, f64::max))
        }),
        check(S, "unit ball λ₁ = π²", 1e-3, || {
            let s = find_eigenvalues(&ball(1.0)?, None, 1, &spatial_cfg).map_err(|e| e.to_string())?;
            Ok(rel(s.eigenvalues.first().ok_or("no eigenvalue")?.lambda, PI * PI))
        }),
        check(S, "scaling λ(tω) = λ(ω)/t², t ∈ {0.5, 2}", 1e-4, || {
            let mut worst: f64 = 0.0;
            for (dim, base) in [(2, J01 * J01), (3, PI * PI)] {
                let (make, cfg): (&dyn Fn(f64) -> Result<Body, String>, &MfsConfig) =
                    if dim == 2 { (&disk, &planar_cfg) } else { (&ball, &spatial_cfg) };
                let l1 = first_eigenvalue(&make(1.0)?, base, cfg)?;
                for s in [0.5, 2.0] {
                    // the untampered scaled body against the tampered unit one
                    let exact = if dim == 2 { Body::disk(s) } else { Body::ball(s) };
                    let ls = first_eigenvalue(&exact, base / (s * s), cfg)?;
                    worst = worst.max(rel(ls * s * s, l1));
                }
            }
            Ok(worst)
        }),
    ]
}

fn solver(t: Tamper) -> Vec<Check> {
    use Suite::Solver as V;
    vec![check(V, "bit-identical reruns", 0.0, || {
        let prob = build("min_area_cw_2d", &Params::default().with_degree(12).with_grid(96)).map_err(|e| e.to_string())?;
        let once = |start: Vec<f64>| {
            let mut p = prob.nlp.clone();
            p.start = start;
            solve(&p, &prob.options).map_err(|e| e.to_string())
        };
        let a = once(prob.nlp.start.clone())?;
        let b = once(prob.nlp.start.clone())?;
        let c = once(if t.0 { prob.with_seed(prob.seed + 1).start } else { prob.nlp.start.clone() })?;
        let bits = |r: &supportshape_nlp::SolveReport| r.final_coeffs.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        let same = bits(&a) == bits(&b) && bits(&a) == bits(&c) && a.log == b.log && a.iterations == c.iterations;
        let batch = |s| prob.solve(3, s, &prob.options).into_iter().map(|o| o.result.map(|r| bits(&r)).ok()).collect::<Vec<_>>();
        let same = same && batch(5) == batch(5);
        Ok(if same { 0.0 } else { 1.0 })
    })]
}
