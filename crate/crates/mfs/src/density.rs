use std::f64::consts::PI;

use supportshape_core::functionals::{coeff_gradient_from_density_2d, coeff_gradient_from_density_3d};
use supportshape_core::harmonics::HarmonicGrid;
use supportshape_core::legendre::gauss_legendre;
use supportshape_core::{FourierSupport2D, SphereGrid, SpherePoint, SphericalSupport3D};

use crate::body::{Body, BoundarySample};
use crate::eigenfunction::Eigenfunction;
use crate::spectrum::EigenResult;
use crate::MfsError;

const RADIAL_NODES: usize = 20;

/// Hadamard density `f = -(∂u/∂n)²` of a simple Dirichlet eigenvalue with
/// `∫_ω u² = 1`: `dλ = ∫_{∂ω} f V·n dσ`.
#[derive(Debug, Clone)]
pub struct HadamardDensity {
    pub lambda: f64,
    pub body: Body,
    /// The eigenfunction, normalized.
    pub function: Eigenfunction,
}

impl HadamardDensity {
    pub fn at(&self, b: &BoundarySample) -> f64 {
        let d = self.function.normal_derivative(b.point, b.normal);
        -d * d
    }

    /// Planar density at normal angle `θ`.
    pub fn at_angle(&self, theta: f64) -> f64 {
        match &self.body {
            Body::Planar(p) => self.at(&Body::boundary_at_angle(p, theta)),
            Body::Spatial(_) => f64::NAN,
        }
    }

    /// Spatial density at a normal direction.
    pub fn at_direction(&self, n: &SpherePoint) -> f64 {
        match &self.body {
            Body::Spatial(p) => self.at(&Body::boundary_at_angles(p, n.phi, n.psi)),
            Body::Planar(_) => f64::NAN,
        }
    }

    /// `∂λ/∂a_j` for every support-function coefficient.
    pub fn coeff_gradient(&self) -> Result<Vec<f64>, MfsError> {
        Ok(match &self.body {
            Body::Planar(p) => {
                let nodes = (8 * p.order()).max(512);
                coeff_gradient_from_density_2d(&|t| self.at_angle(t), p, nodes)?
            }
            Body::Spatial(p) => {
                let grid = SphereGrid::quadrature_for_degree(3 * p.degree() + 8)?;
                coeff_gradient_from_density_3d(&|n| self.at_direction(n), p, &grid)?
            }
        })
    }

    /// `∫_{∂ω} f dσ`, the derivative of `λ` under unit normal inflation.
    pub fn boundary_integral(&self) -> Result<f64, MfsError> {
        let g = self.coeff_gradient()?;
        Ok(match self.body {
            // p ↦ p + h moves a0 by h, a00 by 2√π h
            Body::Planar(_) => g[0],
            Body::Spatial(_) => 2.0 * PI.sqrt() * g[0],
        })
    }
}

/// Density of `result` on `body`.
pub fn eigen_gradient_density(result: &EigenResult, body: &Body) -> Result<HadamardDensity, MfsError> {
    if !result.is_simple() {
        return Err(MfsError::DegenerateEigenvalue {
            lambda: result.lambda,
            multiplicity: result.multiplicity,
            gap: result.gap,
        });
    }
    branch_density(result, body)
}

/// Density of the eigenfunction carried by `result` even inside a cluster.
/// There `λ` is only directionally differentiable and this is the
/// derivative of one branch, with no guarantee of being a descent
/// direction for the cluster; optimizers use it as a surrogate.
pub fn branch_density(result: &EigenResult, body: &Body) -> Result<HadamardDensity, MfsError> {
    let norm2 = norm_squared(&result.eigenfunction, body)?;
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(MfsError::Linalg(format!("eigenfunction has squared norm {norm2}")));
    }
    Ok(HadamardDensity {
        lambda: result.lambda,
        body: body.clone(),
        function: result.eigenfunction.clone().scaled(1.0 / norm2.sqrt()),
    })
}

/// `∫_ω u²` by rays from the Steiner point `c` to the boundary: a fan of
/// triangles in the plane, cones over surface patches in space, Gauss in
/// the radial variable.
pub fn norm_squared(u: &Eigenfunction, body: &Body) -> Result<f64, MfsError> {
    let (t0, w0) = gauss_legendre(RADIAL_NODES);
    let c = body.steiner_point();
    let d = body.dim() as i32;
    let radial = |x: [f64; 3]| -> f64 {
        t0.iter()
            .zip(&w0)
            .map(|(ti, wi)| {
                let t = 0.5 * (ti + 1.0);
                let y = [0, 1, 2].map(|a| c[a] + t * (x[a] - c[a]));
                let v = u.value(y);
                0.5 * wi * v * v * t.powi(d - 1)
            })
            .sum()
    };
    // boundary point, ray weight (x - c)·n, surface element
    let patches = match body {
        Body::Planar(p) => fan(p),
        Body::Spatial(p) => shell(p)?,
    };
    Ok(patches
        .iter()
        .map(|(b, ds)| {
            let h = (0..3).map(|a| (b.point[a] - c[a]) * b.normal[a]).sum::<f64>();
            radial(b.point) * h * ds
        })
        .sum())
}

fn fan(p: &FourierSupport2D) -> Vec<(BoundarySample, f64)> {
    let nodes = (8 * p.order()).max(256);
    let h = 2.0 * PI / nodes as f64;
    (0..nodes)
        .map(|i| {
            let t = i as f64 * h;
            (Body::boundary_at_angle(p, t), h * p.radius_of_curvature(t))
        })
        .collect()
}

fn shell(p: &SphericalSupport3D) -> Result<Vec<(BoundarySample, f64)>, MfsError> {
    let grid = SphereGrid::quadrature_for_degree((3 * p.degree()).max(24))?;
    let tables = HarmonicGrid::new(p.degree(), &grid);
    let jac = tables.jacobians(p.coeffs());
    Ok(grid
        .points
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let ds = grid.weights[i] * jac[i] * tables.inv_sin[i];
            (Body::boundary_at_angles(p, pt.phi, pt.psi), ds)
        })
        .collect())
}
