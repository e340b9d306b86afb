use openblas_src as _;

use std::f64::consts::PI;

use supportshape_core::FourierSupport2D;
use supportshape_mfs::{eigen_gradient_density, find_eigenvalues, Body, EigenResult, MfsConfig, MfsError};

mod common;
use common::{bessel_zero, planar, rel, spatial};

fn first(body: &Body, guess: f64, cfg: &MfsConfig) -> EigenResult {
    let s = find_eigenvalues(body, Some((0.85 * guess, 1.15 * guess)), 1, cfg).unwrap();
    s.eigenvalues[0].clone()
}

fn j01_sq() -> f64 {
    bessel_zero(0, 1.0).powi(2)
}

#[test]
fn disk_density_is_constant_and_matches_the_radial_derivative() {
    let disk = Body::disk(1.0);
    let e = first(&disk, j01_sq(), &planar());
    let f = eigen_gradient_density(&e, &disk).unwrap();
    let vals: Vec<f64> = (0..64).map(|i| f.at_angle(2.0 * PI * i as f64 / 64.0)).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    assert!(vals.iter().all(|v| (v - mean).abs() <= 1e-3 * mean.abs()), "{vals:?}");
    // λ(a0) = j²/a0² gives ∂λ/∂a0 = -2λ at a0 = 1
    let g = f.coeff_gradient().unwrap();
    assert!(rel(g[0], -2.0 * e.lambda) <= 1e-2, "{} vs {}", g[0], -2.0 * e.lambda);
    // closed form: u = J0(j r) / (√π J1(j)), so (∂u/∂n)² = j² / π = λ / π
    assert!(rel(mean, -e.lambda / PI) <= 1e-3);
}

#[test]
fn inflation_derivative_matches_difference_quotient() {
    let h = 1e-4;
    let cfg = planar();
    let e = first(&Body::disk(1.0), j01_sq(), &cfg);
    let f = eigen_gradient_density(&e, &Body::disk(1.0)).unwrap();
    let grown = first(&Body::disk(1.0 + h), j01_sq(), &cfg);
    let quotient = (grown.lambda - e.lambda) / h;
    let integral = f.boundary_integral().unwrap();
    assert!(rel(integral, quotient) <= 1e-2, "{integral} vs {quotient}");
}

fn wobbly() -> FourierSupport2D {
    FourierSupport2D::new(1.0, vec![0.05, 0.06, -0.01], vec![-0.02, 0.0, 0.02]).unwrap()
}

#[test]
fn coefficient_gradient_matches_finite_differences_on_a_wobbly_body() {
    let cfg = planar();
    let p = wobbly();
    let body = Body::Planar(p.clone());
    let e = first(&body, 6.0, &cfg);
    let g = eigen_gradient_density(&e, &body).unwrap().coeff_gradient().unwrap();
    let h = 1e-4;
    let base = p.to_coeffs();
    for j in [0, 2, 3, 5] {
        let shifted = |t: f64| {
            let mut c = base.clone();
            c[j] += t;
            first(&Body::Planar(FourierSupport2D::from_coeffs(&c).unwrap()), e.lambda, &cfg).lambda
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        assert!((fd - g[j]).abs() <= 1e-3 * g[0].abs(), "coefficient {j}: {} vs fd {fd}", g[j]);
    }
    // translations leave λ unchanged
    assert!(g[1].abs() <= 1e-4 * g[0].abs() && g[4].abs() <= 1e-4 * g[0].abs());
}

#[test]
fn normalization_satisfies_the_rellich_identity() {
    // ∫_{∂ω} (x·n)(∂u/∂n)² dσ = 2λ for ∫u² = 1, from boundary data alone
    let p = wobbly();
    let body = Body::Planar(p.clone());
    let e = first(&body, 6.0, &planar());
    let f = eigen_gradient_density(&e, &body).unwrap();
    let nodes = 1024;
    let h = 2.0 * PI / nodes as f64;
    let rellich: f64 = (0..nodes)
        .map(|i| {
            let t = i as f64 * h;
            -f.at_angle(t) * p.eval(t, 0) * p.radius_of_curvature(t) * h
        })
        .sum();
    assert!(rel(rellich, 2.0 * e.lambda) <= 1e-4, "{rellich} vs {}", 2.0 * e.lambda);
}

#[test]
fn ball_gradient_follows_the_scaling_law() {
    let ball = Body::ball(1.0);
    let e = first(&ball, PI * PI, &spatial());
    let f = eigen_gradient_density(&e, &ball).unwrap();
    // r = a00 / (2√π), λ = π² / r²  ⇒  ∂λ/∂a00 = -λ / √π at r = 1
    let g = f.coeff_gradient().unwrap();
    assert!(rel(g[0], -e.lambda / PI.sqrt()) <= 1e-2, "{} vs {}", g[0], -e.lambda / PI.sqrt());
    // inflation: d/dr (π²/r²) = -2π²
    assert!(rel(f.boundary_integral().unwrap(), -2.0 * e.lambda) <= 1e-2);
}

#[test]
fn multiple_eigenvalues_have_no_density() {
    let disk = Body::disk(1.0);
    let j11 = bessel_zero(1, 1.0);
    let s = find_eigenvalues(&disk, Some((12.0, 17.0)), 2, &planar()).unwrap();
    assert_eq!(s.eigenvalues.len(), 2);
    assert!((s.eigenvalues[0].lambda - j11 * j11).abs() < 1e-3);
    for e in &s.eigenvalues {
        assert!(matches!(
            eigen_gradient_density(e, &disk),
            Err(MfsError::DegenerateEigenvalue { multiplicity: 2, .. })
        ));
    }
}
