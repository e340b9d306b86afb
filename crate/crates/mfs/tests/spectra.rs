use openblas_src as _;

use std::f64::consts::PI;

use supportshape_core::SphericalSupport3D;
use supportshape_mfs::{find_eigenvalues, sigma1, Body, Discretization, MfsConfig, MfsError};

mod common;
use common::{bessel_zero, bisect, planar, rel, spatial};

/// First zero of the spherical Bessel function `j₁`, i.e. of `tan x - x`.
fn spherical_j1_zero() -> f64 {
    bisect(|x| x.sin() - x * x.cos(), 4.0, 4.6)
}

#[test]
fn subspace_angle_vanishes_exactly_at_eigenvalues() {
    let j01 = bessel_zero(0, 1.0);
    let disk = Body::disk(1.0);
    assert!(sigma1(&disk, j01 * j01, &planar()).unwrap() <= 1e-4);
    assert!(sigma1(&disk, 4.0, &planar()).unwrap() >= 1e-2);
    assert!(sigma1(&Body::ball(1.0), PI * PI, &spatial()).unwrap() <= 1e-4);
}

#[test]
fn disk_spectrum_is_squared_bessel_zeros() {
    let j01 = bessel_zero(0, 1.0);
    let j11 = bessel_zero(1, 1.0);
    let j21 = bessel_zero(2, 1.0);
    let expected = [j01 * j01, j11 * j11, j11 * j11, j21 * j21];
    let s = find_eigenvalues(&Body::disk(1.0), None, 4, &planar()).unwrap();
    let got: Vec<f64> = s.eigenvalues.iter().map(|e| e.lambda).collect();
    assert_eq!(got.len(), 4, "{got:?}");
    for (g, e) in got.iter().zip(&expected) {
        assert!(rel(*g, *e) <= 1e-3, "{g} vs {e}");
    }
    assert!((expected[0] - 5.7832).abs() < 1e-4 && (expected[1] - 14.6820).abs() < 1e-4);
    assert_eq!(s.eigenvalues[1].multiplicity, 2);
    assert!(s.eigenvalues[0].is_simple());
    assert!(!s.missed);
}

#[test]
fn ball_spectrum_starts_with_pi_squared_and_a_triplet() {
    let z = spherical_j1_zero();
    let s = find_eigenvalues(&Body::ball(1.0), Some((8.0, 22.0)), 4, &spatial()).unwrap();
    let got: Vec<f64> = s.eigenvalues.iter().map(|e| e.lambda).collect();
    assert_eq!(got.len(), 4, "{got:?}");
    assert!(rel(got[0], PI * PI) <= 1e-3, "{}", got[0]);
    for g in &got[1..] {
        assert!((g - z * z).abs() <= 1e-2, "{g} vs {}", z * z);
    }
    assert!((z * z - 20.1907).abs() < 1e-4);
}

fn first_eigenvalue(body: &Body, guess: f64, cfg: &MfsConfig) -> f64 {
    let s = find_eigenvalues(body, Some((0.9 * guess, 1.1 * guess)), 1, cfg).unwrap();
    s.eigenvalues[0].lambda
}

#[test]
fn eigenvalues_scale_with_inverse_square() {
    let j01 = bessel_zero(0, 1.0);
    for (body, base, cfg) in [(Body::disk(1.0), j01 * j01, planar()), (Body::ball(1.0), PI * PI, spatial())] {
        let l1 = first_eigenvalue(&body, base, &cfg);
        for t in [0.5, 2.0] {
            let lt = first_eigenvalue(&body.scaled(t), base / (t * t), &cfg);
            assert!(rel(lt * t * t, l1) <= 1e-4, "dim {} t {t}: {lt} vs {l1}", body.dim());
        }
    }
    let l2 = first_eigenvalue(&Body::disk(2.0), j01 * j01 / 4.0, &planar());
    assert!((l2 - 5.7832 / 4.0).abs() <= 1e-4);
}

/// Smooth convex body inside the unit ball: `p ≤ 1` everywhere.
fn body_inside_ball(seed: u64) -> Body {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut p = SphericalSupport3D::ball(0.8, 3);
    for i in 4..16 {
        p.coeffs_mut()[i] = rng.random_range(-0.03..0.03);
    }
    let grid = supportshape_core::make_sphere_grid(4000, 0.0).unwrap();
    assert!(grid.points.iter().all(|u| p.eval_direction(u.n) < 1.0));
    Body::Spatial(p)
}

#[test]
fn inclusion_monotonicity_against_the_ball() {
    let cfg = spatial();
    let ball = first_eigenvalue(&Body::ball(1.0), PI * PI, &cfg);
    for seed in 0..3 {
        let body = body_inside_ball(seed);
        let s = find_eigenvalues(&body, None, 1, &cfg).unwrap();
        let l = s.eigenvalues[0].lambda;
        assert!(l > ball, "seed {seed}: {l} <= {ball}");
        // ball of radius 0.8 bounds the perturbed body's eigenvalue loosely
        assert!(l < 1.6 * PI * PI / 0.64, "seed {seed}: {l}");
    }
}

#[test]
fn refining_the_scan_keeps_every_minimum() {
    let body = Body::Planar(supportshape_core::FourierSupport2D::new(1.0, vec![0.0, 0.08, 0.02], vec![0.0, 0.0, 0.01]).unwrap());
    let coarse = planar();
    let fine = MfsConfig { scan_density: 2.0 * coarse.scan_density, ..coarse.clone() };
    let a = find_eigenvalues(&body, None, 6, &coarse).unwrap();
    let b = find_eigenvalues(&body, None, 6, &fine).unwrap();
    assert_eq!(a.found, b.found);
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!(rel(x.lambda, y.lambda) < 1e-7, "{} vs {}", x.lambda, y.lambda);
    }
}

#[test]
fn accepted_modes_vanish_on_held_out_boundary_points() {
    let body = Body::Planar(supportshape_core::FourierSupport2D::new(1.0, vec![0.0, 0.1], vec![0.0, 0.0]).unwrap());
    let cfg = planar();
    let s = find_eigenvalues(&body, None, 2, &cfg).unwrap();
    let disc = Discretization::new(&body, &cfg).unwrap();
    for e in &s.eigenvalues {
        let u = &e.eigenfunction;
        let interior = disc.interior.iter().map(|&x| u.value(x).abs()).fold(0.0, f64::max);
        let boundary = body
            .boundary_samples(997, 0.3)
            .unwrap()
            .iter()
            .map(|b| u.value(b.point).abs())
            .fold(0.0, f64::max);
        assert!(boundary <= 1e-3 * interior, "λ {}: {boundary} vs {interior}", e.lambda);
    }
}

#[test]
fn coarse_scan_and_strict_threshold_raise_the_missed_flag() {
    let cfg = MfsConfig { accept: 1e-14, ..planar() };
    let s = find_eigenvalues(&Body::disk(1.0), Some((5.0, 60.0)), 10, &cfg).unwrap();
    assert!(s.eigenvalues.is_empty());
    assert!(s.missed);
}

#[test]
fn far_sources_make_the_basis_rank_deficient() {
    let cfg = MfsConfig { offset: 4.0, ..MfsConfig::planar() };
    assert!(matches!(sigma1(&Body::disk(1.0), 5.0, &cfg), Err(MfsError::RankDeficiency { .. })));
}

#[test]
fn configurations_are_validated() {
    let disk = Body::disk(1.0);
    for cfg in [
        MfsConfig::planar().with_sizes(300, 300, 40),
        MfsConfig::planar().with_sizes(120, 300, 300),
        MfsConfig { offset: 0.0, ..MfsConfig::planar() },
    ] {
        assert!(matches!(sigma1(&disk, 5.0, &cfg), Err(MfsError::InvalidConfig(_))));
    }
    assert!(sigma1(&disk, -1.0, &planar()).is_err());
}

#[test]
fn interior_points_are_seeded() {
    let disk = Body::disk(1.0);
    let a = Discretization::new(&disk, &planar().with_seed(3)).unwrap();
    let b = Discretization::new(&disk, &planar().with_seed(3)).unwrap();
    let c = Discretization::new(&disk, &planar().with_seed(4)).unwrap();
    assert_eq!(a.interior, b.interior);
    assert_ne!(a.interior, c.interior);
    assert!(a.interior.iter().all(|x| x[0].hypot(x[1]) < 0.9));
}
