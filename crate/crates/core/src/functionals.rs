//! Shape functionals with exact coefficient-space derivatives.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Result, ShapeError};
use crate::fourier::{self, FourierSupport2D};
use crate::harmonics::{sph_lm, HarmonicGrid, SphericalSupport3D};
use crate::sphere::{SphereGrid, SpherePoint};
use crate::sum::{compensated_sum, NeumaierSum};

/// Tolerance below zero before a surface Jacobian sample counts as a
/// convexity violation.
pub const JACOBIAN_FLOOR: f64 = -1e-10;

/// A scalar with its gradient (and optionally Hessian) with respect to the
/// flat coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedValue {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Option<Array2<f64>>,
}

impl GradedValue {
    pub fn new(value: f64, gradient: Vec<f64>, hessian: Option<Array2<f64>>) -> Self {
        Self { value, gradient, hessian }
    }

    pub fn len(&self) -> usize {
        self.gradient.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gradient.is_empty()
    }

    pub fn scaled(mut self, t: f64) -> Self {
        self.value *= t;
        self.gradient.iter_mut().for_each(|g| *g *= t);
        if let Some(h) = self.hessian.as_mut() {
            *h *= t;
        }
        self
    }

    /// `self + t · other`. The Hessian is kept only if both carry one.
    pub fn add_scaled(mut self, t: f64, other: &GradedValue) -> Self {
        self.value += t * other.value;
        for (g, o) in self.gradient.iter_mut().zip(&other.gradient) {
            *g += t * o;
        }
        self.hessian = match (self.hessian.take(), &other.hessian) {
            (Some(mut h), Some(o)) => {
                h.scaled_add(t, o);
                Some(h)
            }
            _ => None,
        };
        self
    }

    pub fn product(a: &GradedValue, b: &GradedValue) -> GradedValue {
        let gradient = a.gradient.iter().zip(&b.gradient).map(|(ga, gb)| ga * b.value + a.value * gb).collect();
        let hessian = match (&a.hessian, &b.hessian) {
            (Some(ha), Some(hb)) => {
                let n = a.len();
                let mut h = ha * b.value + hb * a.value;
                for i in 0..n {
                    for j in 0..n {
                        h[[i, j]] += a.gradient[i] * b.gradient[j] + b.gradient[i] * a.gradient[j];
                    }
                }
                Some(h)
            }
            _ => None,
        };
        GradedValue { value: a.value * b.value, gradient, hessian }
    }

    /// `a / b` by the quotient rule.
    pub fn quotient(a: &GradedValue, b: &GradedValue) -> GradedValue {
        let q = a.value / b.value;
        let gradient: Vec<f64> =
            a.gradient.iter().zip(&b.gradient).map(|(ga, gb)| (ga - q * gb) / b.value).collect();
        let hessian = match (&a.hessian, &b.hessian) {
            (Some(ha), Some(hb)) => {
                // ∇²q = (∇²a - q ∇²b - ∇q ∇bᵀ - ∇b ∇qᵀ) / b
                let n = a.len();
                let mut h = ha - &(hb * q);
                for i in 0..n {
                    for j in 0..n {
                        h[[i, j]] -= gradient[i] * b.gradient[j] + b.gradient[i] * gradient[j];
                    }
                }
                Some(h / b.value)
            }
            _ => None,
        };
        GradedValue { value: q, gradient, hessian }
    }

    /// `a^e` for a positive `a`.
    pub fn powf(a: &GradedValue, e: f64) -> GradedValue {
        let v = a.value.powf(e);
        let d1 = e * a.value.powf(e - 1.0);
        let d2 = e * (e - 1.0) * a.value.powf(e - 2.0);
        let gradient = a.gradient.iter().map(|g| d1 * g).collect();
        let hessian = a.hessian.as_ref().map(|h| {
            let n = a.len();
            let mut out = h * d1;
            for i in 0..n {
                for j in 0..n {
                    out[[i, j]] += d2 * a.gradient[i] * a.gradient[j];
                }
            }
            out
        });
        GradedValue { value: v, gradient, hessian }
    }
}

/// Perimeter `2π a0`.
pub fn perimeter_2d(p: &FourierSupport2D) -> GradedValue {
    let n = p.coeff_len();
    let mut gradient = vec![0.0; n];
    gradient[0] = 2.0 * PI;
    GradedValue::new(2.0 * PI * p.a0, gradient, Some(Array2::zeros((n, n))))
}

/// Area `π a0² + (π/2) Σ (1 - k²)(a_k² + b_k²)`.
pub fn area_2d(p: &FourierSupport2D) -> GradedValue {
    let order = p.order();
    let n = p.coeff_len();
    let mut gradient = vec![0.0; n];
    let mut hessian = Array2::zeros((n, n));
    let mut value = NeumaierSum::new();
    value.add(PI * p.a0 * p.a0);
    gradient[0] = 2.0 * PI * p.a0;
    hessian[[0, 0]] = 2.0 * PI;
    for k in 1..=order {
        let c = 0.5 * PI * (1.0 - (k * k) as f64);
        let (ak, bk) = (p.a[k - 1], p.b[k - 1]);
        value.add(c * (ak * ak + bk * bk));
        let (ia, ib) = (fourier::cos_index(k), fourier::sin_index(order, k));
        gradient[ia] = 2.0 * c * ak;
        gradient[ib] = 2.0 * c * bk;
        hessian[[ia, ia]] = 2.0 * c;
        hessian[[ib, ib]] = 2.0 * c;
    }
    GradedValue::new(value.value(), gradient, Some(hessian))
}

/// `p(θ) + p(θ + π)`.
pub fn width_2d(p: &FourierSupport2D, theta: f64) -> f64 {
    p.eval(theta, 0) + p.eval(theta + PI, 0)
}

/// `p(u) + p(-u)`.
pub fn width_3d(p: &SphericalSupport3D, u: [f64; 3]) -> f64 {
    p.eval_direction(u) + p.eval_direction([-u[0], -u[1], -u[2]])
}

/// `E(h) = Σ_{l>=1} (l(l+1)/2 - 1) a_{l,m}²` over the non-constant part.
///
/// `l(l+1)` is the Laplace-Beltrami eigenvalue of `Y_l^m`.
pub fn energy(p: &SphericalSupport3D) -> GradedValue {
    let c = p.coeffs();
    let n = c.len();
    let mut gradient = vec![0.0; n];
    let mut hessian = Array2::zeros((n, n));
    let mut value = NeumaierSum::new();
    for (i, &a) in c.iter().enumerate().skip(1) {
        let l = sph_lm(i).0 as f64;
        let w = l * (l + 1.0) / 2.0 - 1.0;
        value.add(w * a * a);
        gradient[i] = 2.0 * w * a;
        hessian[[i, i]] = 2.0 * w;
    }
    GradedValue::new(value.value(), gradient, Some(hessian))
}

/// Volume of a constant-width-`w` body, `(π/6) w³ - (w/2) E(h)`.
pub fn volume_cw_3d(p: &SphericalSupport3D, w: f64) -> GradedValue {
    let e = energy(p);
    let mut out = e.scaled(-w / 2.0);
    out.value += PI / 6.0 * w * w * w;
    out
}

/// Surface area `π w² - E(h)` with `w = 2 a_{0,0} Y_0^0`, i.e. `a_{0,0}² - E(h)`.
pub fn area_3d(p: &SphericalSupport3D) -> GradedValue {
    let a00 = p.coeffs()[0];
    let mut out = energy(p).scaled(-1.0);
    out.value += a00 * a00;
    out.gradient[0] = 2.0 * a00;
    if let Some(h) = out.hessian.as_mut() {
        h[[0, 0]] = 2.0;
    }
    out
}

/// Volume by the divergence theorem, `(1/3) ∫_{S²} p · Jac / sin ψ dσ`,
/// quadrature tables cached for repeated evaluation.
#[derive(Debug, Clone)]
pub struct VolumeFunctional {
    tables: HarmonicGrid,
}

impl VolumeFunctional {
    pub fn new(degree: usize, grid: &SphereGrid) -> Self {
        Self { tables: HarmonicGrid::new(degree, grid) }
    }

    pub fn tables(&self) -> &HarmonicGrid {
        &self.tables
    }

    pub fn evaluate(&self, coeffs: &[f64], want_hessian: bool) -> Result<GradedValue> {
        self.tables.check_coeffs(coeffs)?;
        let jac = self.tables.jacobians(coeffs);
        if let Some((index, &value)) = jac.iter().enumerate().find(|(_, j)| **j < JACOBIAN_FLOOR) {
            return Err(ShapeError::NonConvexSample { index, value });
        }
        Ok(self.cubic_form(coeffs, &jac, want_hessian))
    }

    /// The same cubic form without the convexity check. It is the volume
    /// whenever the body is convex; optimizers whose convexity rows sit on
    /// a different grid need it at near-boundary iterates.
    pub fn evaluate_unchecked(&self, coeffs: &[f64], want_hessian: bool) -> Result<GradedValue> {
        self.tables.check_coeffs(coeffs)?;
        let jac = self.tables.jacobians(coeffs);
        Ok(self.cubic_form(coeffs, &jac, want_hessian))
    }

    fn cubic_form(&self, coeffs: &[f64], jac: &[f64], want_hessian: bool) -> GradedValue {
        let t = &self.tables;
        let p = t.values(coeffs);
        let w = &t.grid.weights;
        let third = 1.0 / 3.0;
        let value = third * compensated_sum((0..t.len()).map(|i| w[i] * p[i] * jac[i] * t.inv_sin[i]));

        // ∂V/∂a = (1/3) Σ w (Y K + p ∂K), K = Jac / sin ψ.
        let dk = t.jacobian_gradients(coeffs);
        let n = t.coeff_len();
        let mut gradient = vec![0.0; n];
        for i in 0..t.len() {
            let k = jac[i] * t.inv_sin[i];
            let pw = w[i] * p[i] * t.inv_sin[i];
            for j in 0..n {
                gradient[j] += third * (w[i] * k * t.y[[i, j]] + pw * dk[[i, j]]);
            }
        }

        let hessian = want_hessian.then(|| {
            let mut wdk = dk.clone();
            for (i, mut row) in wdk.rows_mut().into_iter().enumerate() {
                row *= third * w[i] * t.inv_sin[i];
            }
            let cross = t.y.t().dot(&wdk);
            let pw: Vec<f64> = (0..t.len()).map(|i| third * w[i] * p[i] * t.inv_sin[i]).collect();
            let mut h = t.weighted_jacobian_hessian(&pw);
            h += &cross;
            h += &cross.t();
            h
        });
        GradedValue::new(value, gradient, hessian)
    }
}

pub fn volume_general_3d(p: &SphericalSupport3D, grid: &SphereGrid) -> Result<GradedValue> {
    VolumeFunctional::new(p.degree(), grid).evaluate(p.coeffs(), true)
}

/// Sampler for a Hadamard density `f` on a planar boundary, indexed by normal angle.
pub type BoundaryDensity2D<'a> = dyn Fn(f64) -> f64 + 'a;
/// Sampler for a Hadamard density on a spatial boundary, indexed by normal direction.
pub type BoundaryDensity3D<'a> = dyn Fn(&SpherePoint) -> f64 + 'a;

/// Coefficient gradient `∫_0^{2π} f(θ) φ_j(θ) (p + p'')(θ) dθ` of a
/// functional with shape derivative `∫_{∂ω} f V·n dσ`, by the periodic
/// trapezoid rule on `quad_points` nodes.
pub fn coeff_gradient_from_density_2d(
    f: &BoundaryDensity2D<'_>,
    p: &FourierSupport2D,
    quad_points: usize,
) -> Result<Vec<f64>> {
    let order = p.order();
    if quad_points < 4 * order {
        return Err(ShapeError::InvalidArgument(format!(
            "need at least 4N = {} quadrature points, got {quad_points}",
            4 * order
        )));
    }
    let h = 2.0 * PI / quad_points as f64;
    let n = p.coeff_len();
    let mut acc = vec![NeumaierSum::new(); n];
    for q in 0..quad_points {
        let theta = q as f64 * h;
        let weight = h * f(theta) * p.radius_of_curvature(theta);
        if weight == 0.0 {
            continue;
        }
        let basis = fourier::basis_row(order, theta, 0);
        for (a, b) in acc.iter_mut().zip(&basis) {
            a.add(weight * b);
        }
    }
    Ok(acc.iter().map(NeumaierSum::value).collect())
}

/// Spatial analogue: `Σ_i w_i f(u_i) Y_j(u_i) Jac_i / sin ψ_i` over the grid.
pub fn coeff_gradient_from_density_3d(
    f: &BoundaryDensity3D<'_>,
    p: &SphericalSupport3D,
    grid: &SphereGrid,
) -> Result<Vec<f64>> {
    let tables = HarmonicGrid::new(p.degree(), grid);
    coeff_gradient_from_density_tables(f, p.coeffs(), &tables)
}

pub fn coeff_gradient_from_density_tables(
    f: &BoundaryDensity3D<'_>,
    coeffs: &[f64],
    tables: &HarmonicGrid,
) -> Result<Vec<f64>> {
    tables.check_coeffs(coeffs)?;
    let jac = tables.jacobians(coeffs);
    if let Some((index, &value)) = jac.iter().enumerate().find(|(_, j)| **j < JACOBIAN_FLOOR) {
        return Err(ShapeError::NonConvexSample { index, value });
    }
    let n = tables.coeff_len();
    let mut acc = vec![NeumaierSum::new(); n];
    for (i, pt) in tables.grid.points.iter().enumerate() {
        let weight = tables.grid.weights[i] * f(pt) * jac[i] * tables.inv_sin[i];
        if weight == 0.0 {
            continue;
        }
        for (j, a) in acc.iter_mut().enumerate() {
            a.add(weight * tables.y[[i, j]]);
        }
    }
    Ok(acc.iter().map(NeumaierSum::value).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::sph_index;
    use crate::sphere::DEFAULT_POLE_MARGIN;

    fn shoelace(p: &FourierSupport2D, samples: usize) -> f64 {
        let pts: Vec<[f64; 2]> =
            (0..samples).map(|i| p.boundary_point(2.0 * PI * i as f64 / samples as f64)).collect();
        0.5 * (0..samples)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % samples]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    #[test]
    fn perimeter_examples() {
        assert!((perimeter_2d(&FourierSupport2D::disk(1.0, 3)).value - 2.0 * PI).abs() < 1e-15);
        assert!((perimeter_2d(&FourierSupport2D::disk(0.5, 3)).value - PI).abs() < 1e-15);
        let mut reuleaux_like = FourierSupport2D::disk(1.0, 9);
        reuleaux_like.a[2] = -0.1;
        let g = perimeter_2d(&reuleaux_like);
        assert!((g.value - 2.0 * PI).abs() < 1e-15);
        assert!(g.gradient[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn area_examples_and_shoelace_oracle() {
        assert!((area_2d(&FourierSupport2D::disk(1.0, 3)).value - PI).abs() < 1e-15);
        let mut p = FourierSupport2D::disk(1.0, 3);
        p.a[2] = 0.1;
        let a = area_2d(&p).value;
        assert!((a - (PI - 0.04 * PI)).abs() < 1e-14);
        assert!((a - shoelace(&p, 10_000)).abs() < 1e-6);
    }

    #[test]
    fn area_ignores_translation_terms() {
        let mut p = FourierSupport2D::disk(1.0, 4);
        p.a[3] = 0.02;
        p.b[1] = -0.03;
        let q = p.translated(0.7, -1.3);
        assert_eq!(area_2d(&p).value, area_2d(&q).value);
        assert_eq!(perimeter_2d(&p).value, perimeter_2d(&q).value);
    }

    #[test]
    fn width_examples() {
        assert!((width_2d(&FourierSupport2D::disk(0.5, 4), 1.1) - 1.0).abs() < 1e-15);
        let mut odd = FourierSupport2D::disk(0.75, 5);
        odd.a[2] = 0.05;
        odd.b[4] = -0.01;
        for i in 0..10 {
            assert!((width_2d(&odd, 0.6 * i as f64) - 1.5).abs() < 1e-14);
        }
        let mut even = FourierSupport2D::disk(1.0, 2);
        even.a[1] = 0.1;
        assert!((width_2d(&even, 0.0) - 2.2).abs() < 1e-14);
        let ball = SphericalSupport3D::ball(0.5, 3);
        assert!((width_3d(&ball, [0.6, 0.0, 0.8]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn energy_matches_quadrature_of_dirichlet_form() {
        let degree = 4;
        let c = 0.3;
        let mut h = SphericalSupport3D::ball(0.0, degree);
        h.set(3, 0, c);
        assert!((energy(&h).value - 5.0 * c * c).abs() < 1e-15);
        let mut t = SphericalSupport3D::ball(0.0, degree);
        t.set(1, -1, c);
        assert_eq!(energy(&t).value, 0.0);
        assert_eq!(energy(&SphericalSupport3D::ball(0.0, 2)).value, 0.0);

        // (1/2)|∇h|² - h² integrated numerically for a mixed h
        let mut mixed = SphericalSupport3D::ball(0.0, degree);
        mixed.set(2, 1, 0.2);
        mixed.set(3, -2, -0.1);
        mixed.set(4, 4, 0.05);
        let grid = SphereGrid::gauss_product(12, 20, DEFAULT_POLE_MARGIN).unwrap();
        let quad: f64 = grid
            .points
            .iter()
            .zip(&grid.weights)
            .map(|(pt, w)| {
                let v = mixed.eval(pt.phi, pt.psi, crate::SphDeriv::None).unwrap();
                let dp = mixed.eval(pt.phi, pt.psi, crate::SphDeriv::Phi).unwrap();
                let ds = mixed.eval(pt.phi, pt.psi, crate::SphDeriv::Psi).unwrap();
                let grad2 = ds * ds + dp * dp / pt.psi.sin().powi(2);
                w * (0.5 * grad2 - v * v)
            })
            .sum();
        assert!((quad - energy(&mixed).value).abs() < 1e-12);
    }

    #[test]
    fn sphere_volume_and_area() {
        let grid = SphereGrid::quadrature_for_degree(12).unwrap();
        let half = SphericalSupport3D::ball(0.5, 2);
        assert!((volume_general_3d(&half, &grid).unwrap().value - PI / 6.0).abs() < 1e-12);
        assert!((volume_cw_3d(&half, 1.0).value - PI / 6.0).abs() < 1e-15);
        assert!((area_3d(&half).value - PI).abs() < 1e-14);
        let unit = SphericalSupport3D::ball(1.0, 2);
        assert!((volume_general_3d(&unit, &grid).unwrap().value - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((area_3d(&unit).value - 4.0 * PI).abs() < 1e-13);
        let mut shifted = half.clone();
        shifted.set(1, 0, 0.2);
        let v = volume_general_3d(&shifted, &grid).unwrap().value;
        assert!((v - PI / 6.0).abs() < 1e-8);
    }

    #[test]
    fn translation_shifts_sphere_along_z() {
        let mut p = SphericalSupport3D::ball(1.0, 2);
        let t = 0.1;
        p.set(1, 0, t);
        let shift = t * (3.0 / (4.0 * PI)).sqrt();
        let x = p.boundary_point(0.4, 1.0).unwrap();
        let r = (x[0] * x[0] + x[1] * x[1] + (x[2] - shift).powi(2)).sqrt();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_convex_sample_is_reported() {
        let mut p = SphericalSupport3D::ball(0.2, 4);
        p.coeffs_mut()[sph_index(3, 1)] = 0.5;
        let grid = SphereGrid::quadrature_for_degree(12).unwrap();
        assert!(matches!(volume_general_3d(&p, &grid), Err(ShapeError::NonConvexSample { .. })));
    }

    #[test]
    fn density_gradient_2d_examples() {
        let disk = FourierSupport2D::disk(1.0, 6);
        let g = coeff_gradient_from_density_2d(&|_| 1.0, &disk, 48).unwrap();
        assert!((g[0] - 2.0 * PI).abs() < 1e-12);
        assert!(g[1..].iter().all(|v| v.abs() < 1e-10));
        let g = coeff_gradient_from_density_2d(&|t| disk.eval(t, 0), &disk, 48).unwrap();
        let area = area_2d(&disk);
        assert!((g[0] - area.gradient[0]).abs() < 1e-12);
        let zero = coeff_gradient_from_density_2d(&|_| 0.0, &disk, 48).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        assert!(coeff_gradient_from_density_2d(&|_| 1.0, &disk, 10).is_err());
    }

    #[test]
    fn density_gradient_3d_on_sphere() {
        let half = SphericalSupport3D::ball(0.5, 3);
        let grid = SphereGrid::quadrature_for_degree(12).unwrap();
        let g = coeff_gradient_from_density_3d(&|_| 1.0, &half, &grid).unwrap();
        assert!((g[0] - PI / (4.0 * PI).sqrt()).abs() < 1e-12);
        assert!(g[1..].iter().all(|v| v.abs() < 1e-10));
    }
}
