use openblas_src as _;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supportshape_core::constraints::{convexity_3d, NonlinearConstraints};
use supportshape_core::functionals::area_2d;
use supportshape_core::{make_sphere_grid, Direction, FourierSupport2D, Polytope, SphericalSupport3D, DEFAULT_POLE_MARGIN};
use supportshape_nlp::{audit_gradient_with_step, best, Status};
use supportshape_problems::*;

fn small(name: &str) -> Params {
    let tiny_mfs = MfsParams { sources: Some(60), collocation: Some(150), ..MfsParams::default() };
    match name {
        "min_area_cw_2d" => Params::default().with_degree(12),
        "min_vol_cw_3d" | "min_area_width_3d" => Params::default().with_degree(5).with_grid(300),
        "eig_convex" => Params { mfs: Some(tiny_mfs), ..Params::default().with_degree(6) },
        "eig_cw_3d" => Params::default().with_degree(3).with_k(1),
        "j_gamma" => Params::default().with_degree(20).with_grid(200),
        "cheeger_2d" => Params::default().with_degree(20),
        "cheeger" => Params::default().with_degree(5).with_grid(300),
        _ => Params::default(),
    }
}

#[test]
fn every_problem_builds_with_a_feasible_audited_start() {
    for name in PROBLEMS {
        let p = build(name, &small(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let start = &p.nlp.start;
        assert_eq!(p.nlp.pattern.fixed_deviation(start), 0.0, "{name}");
        assert!(p.nlp.max_violation(start) <= 1e-12, "{name}: {}", p.nlp.max_violation(start));
        let audit = audit_gradient_with_step(&p.nlp, start, p.options.audit_step).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(audit.max_error() <= p.options.audit_tol, "{name}: {audit:?}");
        assert_eq!(p.spec.name, name);
    }
}

#[test]
fn catalog_errors() {
    match build("reuleaux", &Params::default()) {
        Err(CatalogError::UnknownProblem { name, known }) => {
            assert_eq!(name, "reuleaux");
            assert_eq!(known, PROBLEMS.to_vec());
        }
        other => panic!("{other:?}"),
    }
    let invalid = [
        ("min_area_cw_2d", Params::default().with_gamma(0.4)),
        ("min_area_cw_2d", Params::default().with_width(-1.0)),
        ("j_gamma", Params::default().with_degree(50).with_grid(60)),
        ("rotor_min", Params::default().with_rotor("pentagon")),
        ("rotor_min", Params::default().with_rotor("tetrahedron").with_degrees(&[3])),
        ("cheeger", Params::default().with_container("square")),
        ("eig_convex", Params::default().with_dim(4)),
    ];
    for (name, params) in invalid {
        assert!(matches!(build(name, &params), Err(CatalogError::InvalidParams(_))), "{name} {params:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn constant_width_area_is_the_area_functional(seed in any::<u64>()) {
        let p = build("min_area_cw_2d", &Params::default().with_degree(250)).unwrap();
        let x = p.with_seed(seed).start;
        let expected = area_2d(&FourierSupport2D::from_coeffs(&x).unwrap()).value;
        prop_assert!((p.value(&x).unwrap() - expected).abs() <= 1e-14 * expected);
    }
}

/// Unit-width Reuleaux triangle, truncated: its radius of curvature is 1 on
/// three arcs of angle π/3 and 0 at the corners, so `p_k = ρ_k / (1 - k²)`.
fn reuleaux_coeffs(order: usize) -> Vec<f64> {
    let mut c = vec![0.0; 2 * order + 1];
    c[0] = 0.5;
    for k in (3..=order).step_by(3) {
        let kf = k as f64;
        let rho = 6.0 * (kf * PI / 6.0).sin() / (PI * kf);
        c[k] = rho / (1.0 - kf * kf);
    }
    c
}

#[test]
fn j_gamma_on_the_reuleaux_triangle() {
    let p = build("j_gamma", &Params::default()).unwrap();
    let x = reuleaux_coeffs(p.spec.degree);
    let expected = 0.4 * (PI - 3f64.sqrt()) / 2.0 - PI;
    assert!((p.value(&x).unwrap() - expected).abs() < 1e-6, "{}", p.value(&x).unwrap());
    assert!((j_gamma_reuleaux(0.4) - expected).abs() < 1e-15);
}

#[test]
fn cheeger_square_constant() {
    let p = build("cheeger_2d", &Params::default()).unwrap();
    let outcomes = p.solve(1, 0, &p.options);
    let r = best(&outcomes).unwrap();
    let exact = cheeger_unit_square();
    assert!((exact - (4.0 - PI) / (2.0 - PI.sqrt())).abs() < 1e-12);
    assert!((r.value - exact).abs() / exact <= 5e-3, "{}", r.value);
    assert!(r.value >= exact * (1.0 - 1e-6), "below the true constant: {}", r.value);
}

#[test]
fn j_gamma_regimes() {
    let small_gamma = build("j_gamma", &Params::default().with_gamma(0.4)).unwrap();
    let r = best(&small_gamma.solve(1, 0, &small_gamma.options)).unwrap().clone();
    assert_eq!(r.status, Status::Converged);
    let p = FourierSupport2D::from_coeffs(&r.final_coeffs).unwrap();
    let width_max = (0..2000).map(|i| {
        let t = PI * i as f64 / 2000.0;
        p.eval(t, 0) + p.eval(t + PI, 0)
    });
    assert!((width_max.fold(0.0, f64::max) - 1.0).abs() <= 1e-3);

    let large_gamma = build("j_gamma", &Params::default().with_gamma(1.0)).unwrap();
    let r = best(&large_gamma.solve(1, 0, &large_gamma.options)).unwrap().clone();
    let p = FourierSupport2D::from_coeffs(&r.final_coeffs).unwrap();
    let n = 4000;
    let flat = (0..n).filter(|&i| {
        let t = 2.0 * PI * i as f64 / n as f64;
        p.eval(t, 0) + p.eval(t, 2) <= 1e-3
    });
    assert!(flat.count() as f64 >= 0.3 * n as f64);
}

fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

fn transpose(r: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| r[j][i]))
}

fn units(poly: &Polytope) -> Vec<[f64; 3]> {
    poly.normals.iter().map(|d| if let Direction::Unit(u) = d { *u } else { unreachable!() }).collect()
}

/// Worst rotor defect over random rotations: how far the rotated body's
/// support values at the face normals are from those of a translate of the
/// regular container of inradius `r` (whose normals sum to zero and have
/// `Σ n nᵀ = (k/3) I`), and the largest excess of densely sampled boundary
/// points over the container after that translation.
fn rotor_defects(body: &SphericalSupport3D, poly: &Polytope, r: f64, boundary: &[[f64; 3]], rng: &mut ChaCha8Rng) -> (f64, f64) {
    let normals = units(poly);
    let k = normals.len() as f64;
    let (mut touch, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..25 {
        let rot = random_rotation(rng);
        let back = transpose(&rot);
        // h_{R K}(n) = h_K(Rᵀ n)
        let s: Vec<f64> = normals.iter().map(|n| body.eval_direction(apply(&back, *n))).collect();
        let t: [f64; 3] = std::array::from_fn(|a| -3.0 / k * normals.iter().zip(&s).map(|(n, v)| (v - r) * n[a]).sum::<f64>());
        for (n, v) in normals.iter().zip(&s) {
            touch = touch.max((v + n[0] * t[0] + n[1] * t[1] + n[2] * t[2] - r).abs());
        }
        for x in boundary {
            let y = apply(&rot, *x);
            excess = excess.max(poly.excess(&[y[0] + t[0], y[1] + t[1], y[2] + t[2]]));
        }
    }
    (touch, excess)
}

fn solved_rotor(rotor: &str) -> (Problem, SphericalSupport3D) {
    let p = build("rotor_min", &Params::default().with_rotor(rotor)).unwrap();
    let r = best(&p.solve(2, 0, &p.options)).unwrap().clone();
    assert_eq!(r.status, Status::Converged, "{rotor}");
    (p, SphericalSupport3D::from_coeffs(&r.final_coeffs).unwrap())
}

/// Boundary points on a grid ten times denser than the convexity samples.
/// Convexity itself is only enforced at the samples; between them the
/// surface Jacobian of a sparse optimum dips slightly below zero.
fn dense_check(p: &Problem, body: &SphericalSupport3D) -> Vec<[f64; 3]> {
    let grid = make_sphere_grid(10 * p.spec.grid, DEFAULT_POLE_MARGIN).unwrap();
    let jac = convexity_3d(body.degree(), &grid).unwrap().residual(body.coeffs());
    let lo = jac.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = jac.iter().copied().fold(0.0, f64::max);
    assert!(lo >= -1e-2 * hi, "convexity between samples: {lo} (peak {hi})");
    grid.points.iter().map(|q| body.boundary_point(q.phi, q.psi).unwrap()).collect()
}

#[test]
fn tetrahedral_rotor_fits_on_denser_sets() {
    let (p, body) = solved_rotor("tetrahedron");
    let boundary = dense_check(&p, &body);
    let (touch, excess) = rotor_defects(&body, &Polytope::tetrahedron(0.5), 0.5, &boundary, &mut ChaCha8Rng::seed_from_u64(1));
    assert!(touch <= 1e-10, "{touch}");
    // boundary points where the Jacobian dips between samples fold outward
    assert!(excess <= 1e-4, "{excess}");
}

#[test]
fn octahedral_rotor_is_a_tetrahedral_rotor() {
    let (p, body) = solved_rotor("octahedron");
    let boundary = dense_check(&p, &body);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for poly in [Polytope::octahedron(0.5), Polytope::tetrahedron(0.5)] {
        let (touch, excess) = rotor_defects(&body, &poly, 0.5, &boundary, &mut rng);
        assert!(touch <= 1e-10 && excess <= 1e-4, "{touch} {excess}");
    }
    // and its coefficients fit the tetrahedral pattern
    let tetra = build("rotor_min", &Params::default().with_rotor("tetrahedron")).unwrap();
    assert!(tetra.nlp.pattern.fixed_deviation(body.coeffs()) <= 1e-15);
}

#[test]
fn references_carry_provenance() {
    let table = reference_table();
    let mut keys: Vec<&str> = table.iter().map(|r| r.key).collect();
    keys.sort_unstable();
    keys.dedup();
    assert_eq!(keys.len(), table.len());
    for r in &table {
        assert!(!r.source.trim().is_empty(), "{}", r.key);
        assert!(r.value.is_finite() && r.tolerance > 0.0, "{}", r.key);
        assert_eq!(reference(r.key).as_ref().map(|x| x.value), Some(r.value));
    }
    assert!((reuleaux_area(2.0) - 2.0 * (PI - 3f64.sqrt())).abs() < 1e-15);
    assert!((meissner_volume() - (2.0 / 3.0 - 3f64.sqrt() / 4.0 * (1.0f64 / 3.0).acos()) * PI).abs() < 1e-15);
}
