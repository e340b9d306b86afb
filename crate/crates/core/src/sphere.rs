//! Point sets on the unit sphere in the `(φ, ψ)` parametrization
//! `n(φ, ψ) = (sin φ sin ψ, cos φ sin ψ, cos ψ)`.

use std::f64::consts::PI;

use crate::error::{Result, ShapeError};
use crate::legendre::gauss_legendre;

/// Half-width of the band around `ψ ∈ {0, π}` that constraint and quadrature
/// grids stay out of.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub phi: f64,
    pub psi: f64,
    pub n: [f64; 3],
}

impl SpherePoint {
    pub fn from_angles(phi: f64, psi: f64) -> Self {
        Self { phi, psi, n: sphere_normal(phi, psi) }
    }

    pub fn from_vector(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let n = [v[0] / r, v[1] / r, v[2] / r];
        let (phi, psi) = angles_of(n);
        Self { phi, psi, n }
    }

    pub fn antipode(&self) -> Self {
        let mut phi = self.phi + PI;
        if phi >= PI {
            phi -= 2.0 * PI;
        }
        Self { phi, psi: PI - self.psi, n: [-self.n[0], -self.n[1], -self.n[2]] }
    }
}

pub fn sphere_normal(phi: f64, psi: f64) -> [f64; 3] {
    let (sp, cp) = phi.sin_cos();
    let (ss, cs) = psi.sin_cos();
    [sp * ss, cp * ss, cs]
}

/// `(φ, ψ)` of a unit vector, `φ ∈ [-π, π)`, `ψ ∈ [0, π]`.
pub fn angles_of(n: [f64; 3]) -> (f64, f64) {
    let psi = n[2].clamp(-1.0, 1.0).acos();
    let mut phi = n[0].atan2(n[1]);
    if phi >= PI {
        phi -= 2.0 * PI;
    }
    (phi, psi)
}

/// Sphere point set with solid-angle quadrature weights (`Σ w = 4π`).
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub points: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub pole_margin: f64,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Tensor grid: Gauss-Legendre in `cos ψ`, uniform in `φ`. Exact for
    /// spherical polynomials of degree `< min(2 n_psi, n_phi)`.
    pub fn gauss_product(n_psi: usize, n_phi: usize, pole_margin: f64) -> Result<Self> {
        if n_psi < 2 || n_phi < 3 {
            return Err(ShapeError::InvalidArgument(format!(
                "product grid needs n_psi >= 2 and n_phi >= 3 (got {n_psi}, {n_phi})"
            )));
        }
        let (x, w) = gauss_legendre(n_psi);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_psi * n_phi);
        let mut weights = Vec::with_capacity(n_psi * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let psi = xi.acos();
            if psi < pole_margin || psi > PI - pole_margin {
                return Err(ShapeError::InvalidArgument(format!(
                    "Gauss node psi = {psi} falls inside pole margin {pole_margin}; use fewer psi nodes"
                )));
            }
            for k in 0..n_phi {
                let phi = -PI + (k as f64 + 0.5) * dphi;
                points.push(SpherePoint::from_angles(phi, psi));
                weights.push(wi * dphi);
            }
        }
        Ok(Self { points, weights, pole_margin })
    }

    /// Product grid resolving spherical polynomials up to `degree`
    /// (integrands of degree `degree` are integrated exactly).
    pub fn quadrature_for_degree(degree: usize) -> Result<Self> {
        let n_psi = degree / 2 + 2;
        Self::gauss_product(n_psi, degree + 2, DEFAULT_POLE_MARGIN)
    }
}

/// Fibonacci lattice of `count` near-uniform points with equal weights,
/// clamped so that every point keeps `pole_margin` from both poles.
pub fn make_sphere_grid(count: usize, pole_margin: f64) -> Result<SphereGrid> {
    if count < 12 {
        return Err(ShapeError::InvalidArgument(format!(
            "sphere grid needs at least 12 points, got {count}"
        )));
    }
    if !(0.0..PI / 4.0).contains(&pole_margin) {
        return Err(ShapeError::InvalidArgument(format!("pole margin {pole_margin} out of range")));
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let m = count as f64;
    let points = (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / m;
            let psi = z.acos().clamp(pole_margin, PI - pole_margin);
            let phi = (golden * i as f64).rem_euclid(2.0 * PI) - PI;
            SpherePoint::from_angles(phi, psi)
        })
        .collect();
    Ok(SphereGrid { points, weights: vec![4.0 * PI / m; count], pole_margin })
}
