use std::f64::consts::PI;

use supportshape_core::functionals::{area_2d, area_3d, perimeter_2d, VolumeFunctional};
use supportshape_core::harmonics::{boundary_point_from_sample, HarmonicSample};
use supportshape_core::{
    make_sphere_grid, FourierSupport2D, Space, SphereGrid, SphericalSupport3D, DEFAULT_POLE_MARGIN,
};

use crate::MfsError;

/// Point on the boundary with its outward unit normal. Planar points carry
/// a zero third component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: [f64; 3],
    pub normal: [f64; 3],
}

/// Convex body handed to the eigenvalue solver.
#[derive(Debug, Clone)]
pub enum Body {
    Planar(FourierSupport2D),
    Spatial(SphericalSupport3D),
}

impl Body {
    pub fn from_coeffs(space: Space, coeffs: &[f64]) -> Result<Self, MfsError> {
        if coeffs.len() != space.coeff_len() {
            return Err(MfsError::InvalidConfig(format!(
                "{} coefficients for a space of {}",
                coeffs.len(),
                space.coeff_len()
            )));
        }
        Ok(match space {
            Space::Planar { .. } => Body::Planar(FourierSupport2D::from_coeffs(coeffs)?),
            Space::Spherical { .. } => Body::Spatial(SphericalSupport3D::from_coeffs(coeffs)?),
        })
    }

    pub fn disk(radius: f64) -> Self {
        Body::Planar(FourierSupport2D::disk(radius, 0))
    }

    pub fn ball(radius: f64) -> Self {
        Body::Spatial(SphericalSupport3D::ball(radius, 0))
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Planar(_) => 2,
            Body::Spatial(_) => 3,
        }
    }

    pub fn space(&self) -> Space {
        match self {
            Body::Planar(p) => Space::Planar { order: p.order() },
            Body::Spatial(p) => Space::Spherical { degree: p.degree() },
        }
    }

    pub fn coeffs(&self) -> Vec<f64> {
        match self {
            Body::Planar(p) => p.to_coeffs(),
            Body::Spatial(p) => p.coeffs().to_vec(),
        }
    }

    /// Homothetic copy `t·ω` about the origin.
    pub fn scaled(&self, t: f64) -> Self {
        match self {
            Body::Planar(p) => Body::Planar(p.scaled(t)),
            Body::Spatial(p) => {
                let c: Vec<f64> = p.coeffs().iter().map(|v| v * t).collect();
                Body::Spatial(SphericalSupport3D::new(p.degree(), c).expect("same degree"))
            }
        }
    }

    pub fn mean_width(&self) -> f64 {
        match self {
            Body::Planar(p) => 2.0 * p.a0,
            Body::Spatial(p) => p.mean_width(),
        }
    }

    /// Area in the plane, volume in space.
    pub fn measure(&self) -> Result<f64, MfsError> {
        Ok(match self {
            Body::Planar(p) => area_2d(p).value,
            Body::Spatial(p) => {
                let grid = SphereGrid::quadrature_for_degree(3 * p.degree().max(1))?;
                VolumeFunctional::new(p.degree(), &grid).evaluate(p.coeffs(), false)?.value
            }
        })
    }

    /// Perimeter in the plane, surface area in space.
    pub fn boundary_measure(&self) -> f64 {
        match self {
            Body::Planar(p) => perimeter_2d(p).value,
            Body::Spatial(p) => area_3d(p).value,
        }
    }

    pub fn support(&self, u: [f64; 3]) -> f64 {
        match self {
            Body::Planar(p) => p.eval(u[1].atan2(u[0]), 0),
            Body::Spatial(p) => p.eval_direction(u),
        }
    }

    /// Steiner point, which lies inside every convex body.
    pub fn steiner_point(&self) -> [f64; 3] {
        match self {
            Body::Planar(p) => {
                let (a1, b1) = (p.a.first().copied().unwrap_or(0.0), p.b.first().copied().unwrap_or(0.0));
                [a1, b1, 0.0]
            }
            Body::Spatial(p) => {
                // (3 / 4π) ∫ p(u) u dσ
                let grid = SphereGrid::quadrature_for_degree(p.degree().max(1) + 1).expect("small grid");
                let mut s = [0.0; 3];
                for (pt, w) in grid.points.iter().zip(&grid.weights) {
                    let h = p.eval_direction(pt.n);
                    for (si, ni) in s.iter_mut().zip(pt.n) {
                        *si += w * h * ni;
                    }
                }
                s.map(|v| 3.0 * v / (4.0 * PI))
            }
        }
    }

    pub fn boundary_at_angle(p: &FourierSupport2D, theta: f64) -> BoundarySample {
        let x = p.boundary_point(theta);
        let (s, c) = theta.sin_cos();
        BoundarySample { point: [x[0], x[1], 0.0], normal: [c, s, 0.0] }
    }

    pub fn boundary_at_angles(p: &SphericalSupport3D, phi: f64, psi: f64) -> BoundarySample {
        let psi = psi.clamp(DEFAULT_POLE_MARGIN, PI - DEFAULT_POLE_MARGIN);
        let s = HarmonicSample::new(p.degree(), phi, psi);
        let pt = boundary_point_from_sample(&s, p.coeffs());
        let n = supportshape_core::sphere::sphere_normal(phi, psi);
        BoundarySample { point: pt, normal: n }
    }

    /// `count` boundary points, equispaced in arc length in the plane
    /// (offset by `shift` spacings) and on a Fibonacci set of normals in
    /// space (rotated about the axis by `shift` turns).
    pub fn boundary_samples(&self, count: usize, shift: f64) -> Result<Vec<BoundarySample>, MfsError> {
        match self {
            Body::Planar(p) => Ok(arc_length_angles(p, count, shift)
                .into_iter()
                .map(|t| Self::boundary_at_angle(p, t))
                .collect()),
            Body::Spatial(p) => {
                let grid = make_sphere_grid(count.max(12), DEFAULT_POLE_MARGIN)?;
                Ok(grid
                    .points
                    .iter()
                    .map(|pt| {
                        let phi = (pt.phi + PI + 2.0 * PI * shift).rem_euclid(2.0 * PI) - PI;
                        Self::boundary_at_angles(p, phi, pt.psi)
                    })
                    .collect())
            }
        }
    }
}

/// Normal angles of `count` points equispaced in arc length.
fn arc_length_angles(p: &FourierSupport2D, count: usize, shift: f64) -> Vec<f64> {
    const TABLE: usize = 8192;
    let h = 2.0 * PI / TABLE as f64;
    let s: Vec<f64> = (0..=TABLE).map(|i| p.arc_length(i as f64 * h)).collect();
    let total = s[TABLE];
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for i in 0..count {
        let target = (i as f64 + shift).rem_euclid(count as f64) / count as f64 * total;
        if target < s[j] {
            j = 0;
        }
        while j + 1 < TABLE && s[j + 1] < target {
            j += 1;
        }
        let span = s[j + 1] - s[j];
        let frac = if span > 0.0 { ((target - s[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
        out.push((j as f64 + frac) * h);
    }
    out
}

/// Support-function membership test on a fixed direction set.
#[derive(Debug, Clone)]
pub(crate) struct Membership {
    dirs: Vec<[f64; 3]>,
    support: Vec<f64>,
}

impl Membership {
    pub(crate) fn new(body: &Body) -> Result<Self, MfsError> {
        let dirs: Vec<[f64; 3]> = match body {
            Body::Planar(_) => (0..1024)
                .map(|i| {
                    let (s, c) = (2.0 * PI * i as f64 / 1024.0).sin_cos();
                    [c, s, 0.0]
                })
                .collect(),
            Body::Spatial(_) => make_sphere_grid(2000, 0.0)?.points.iter().map(|p| p.n).collect(),
        };
        let support = dirs.iter().map(|&u| body.support(u)).collect();
        Ok(Self { dirs, support })
    }

    /// Largest `x·u - p(u)`; positive outside.
    pub(crate) fn excess(&self, x: [f64; 3]) -> f64 {
        self.dirs
            .iter()
            .zip(&self.support)
            .map(|(u, p)| u[0] * x[0] + u[1] * x[1] + u[2] * x[2] - p)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bounding box `[lo, hi]` along the coordinate axes.
    pub(crate) fn bounds(body: &Body) -> ([f64; 3], [f64; 3]) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..body.dim() {
            let mut e = [0.0; 3];
            e[a] = 1.0;
            hi[a] = body.support(e);
            e[a] = -1.0;
            lo[a] = -body.support(e);
        }
        (lo, hi)
    }
}
