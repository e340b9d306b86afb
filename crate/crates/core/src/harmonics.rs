//! Spatial support functions as truncated real spherical-harmonic series
//!
//! `p(φ, ψ) = Σ_{l=0}^N Σ_{m=-l}^l a_{l,m} Y_l^m(ψ, φ)` with the orthonormal
//! real harmonics
//!
//! ```text
//! Y_l^m = √2 C_l^m cos(mφ) P_l^m(cos ψ)      m > 0
//!       =    C_l^0         P_l^0(cos ψ)      m = 0
//!       = √2 C_l^m sin(-mφ) P_l^{-m}(cos ψ)  m < 0
//! ```
//!
//! Coefficient `(l, m)` lives at flat index `l² + l + m`.

use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;

use crate::error::{Result, ShapeError};
use crate::legendre::{tri_index, LegendreTable};
use crate::sphere::{sphere_normal, SphereGrid, SpherePoint, DEFAULT_POLE_MARGIN};

#[inline]
pub fn sph_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`sph_index`].
pub fn sph_lm(idx: usize) -> (usize, i64) {
    let l = (idx as f64).sqrt().floor() as usize;
    let l = if (l + 1) * (l + 1) <= idx { l + 1 } else if l * l > idx { l - 1 } else { l };
    (l, idx as i64 - (l * l + l) as i64)
}

pub fn sph_len(degree: usize) -> usize {
    (degree + 1) * (degree + 1)
}

/// Which partial derivative of the harmonic sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphDeriv {
    None,
    Phi,
    Psi,
    PhiPhi,
    PsiPsi,
    PhiPsi,
}

impl SphDeriv {
    fn involves_phi(self) -> bool {
        matches!(self, SphDeriv::Phi | SphDeriv::PhiPhi | SphDeriv::PhiPsi)
    }
}

/// Every basis function and its partials at one `(φ, ψ)`.
#[derive(Debug, Clone)]
pub struct HarmonicSample {
    pub phi: f64,
    pub psi: f64,
    pub y: Vec<f64>,
    pub y_phi: Vec<f64>,
    pub y_psi: Vec<f64>,
    pub y_phiphi: Vec<f64>,
    pub y_psipsi: Vec<f64>,
    pub y_phipsi: Vec<f64>,
}

impl HarmonicSample {
    pub fn new(degree: usize, phi: f64, psi: f64) -> Self {
        let leg = LegendreTable::new(degree, psi);
        let len = sph_len(degree);
        let mut s = Self {
            phi,
            psi,
            y: vec![0.0; len],
            y_phi: vec![0.0; len],
            y_psi: vec![0.0; len],
            y_phiphi: vec![0.0; len],
            y_psipsi: vec![0.0; len],
            y_phipsi: vec![0.0; len],
        };
        for l in 0..=degree {
            let t = tri_index(l, 0);
            let i0 = sph_index(l, 0);
            s.y[i0] = leg.value[t];
            s.y_psi[i0] = leg.d1[t];
            s.y_psipsi[i0] = leg.d2[t];
            for m in 1..=l {
                let t = tri_index(l, m);
                let mf = m as f64;
                let (sn, cs) = (mf * phi).sin_cos();
                let (v, d1, d2) = (SQRT_2 * leg.value[t], SQRT_2 * leg.d1[t], SQRT_2 * leg.d2[t]);

                let ip = sph_index(l, m as i64);
                s.y[ip] = v * cs;
                s.y_phi[ip] = -mf * v * sn;
                s.y_psi[ip] = d1 * cs;
                s.y_phiphi[ip] = -mf * mf * v * cs;
                s.y_psipsi[ip] = d2 * cs;
                s.y_phipsi[ip] = -mf * d1 * sn;

                let im = sph_index(l, -(m as i64));
                s.y[im] = v * sn;
                s.y_phi[im] = mf * v * cs;
                s.y_psi[im] = d1 * sn;
                s.y_phiphi[im] = -mf * mf * v * sn;
                s.y_psipsi[im] = d2 * sn;
                s.y_phipsi[im] = mf * d1 * cs;
            }
        }
        s
    }

    pub fn row(&self, deriv: SphDeriv) -> &[f64] {
        match deriv {
            SphDeriv::None => &self.y,
            SphDeriv::Phi => &self.y_phi,
            SphDeriv::Psi => &self.y_psi,
            SphDeriv::PhiPhi => &self.y_phiphi,
            SphDeriv::PsiPsi => &self.y_psipsi,
            SphDeriv::PhiPsi => &self.y_phipsi,
        }
    }

    /// Linear forms whose combination gives the surface Jacobian.
    pub fn jacobian_rows(&self) -> JacobianRows {
        let (s, c) = self.psi.sin_cos();
        let len = self.y.len();
        let mut l1 = vec![0.0; len];
        let mut l2 = vec![0.0; len];
        let mut l3 = vec![0.0; len];
        for i in 0..len {
            l1[i] = self.y[i] * s + self.y_phiphi[i] / s + self.y_psi[i] * c;
            l2[i] = self.y[i] + self.y_psipsi[i];
            l3[i] = self.y_phi[i] * c / s - self.y_phipsi[i];
        }
        JacobianRows { l1, l2, l3, inv_sin: 1.0 / s }
    }
}

/// `Jac = (l1·a)(l2·a) - (l3·a)² / sin ψ` where
/// `l1·a = p sin ψ + p_φφ / sin ψ + p_ψ cos ψ`, `l2·a = p + p_ψψ` and
/// `l3·a = p_φ cos ψ / sin ψ - p_ψφ`.
///
/// This is the determinant of the (symmetric) differential of the boundary
/// parametrization times the sphere area element; it equals
/// `n · (∂_φ x × ∂_ψ x)`.
#[derive(Debug, Clone)]
pub struct JacobianRows {
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub l3: Vec<f64>,
    pub inv_sin: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl JacobianRows {
    pub fn forms(&self, coeffs: &[f64]) -> (f64, f64, f64) {
        (dot(&self.l1, coeffs), dot(&self.l2, coeffs), dot(&self.l3, coeffs))
    }

    pub fn value(&self, coeffs: &[f64]) -> f64 {
        let (u, v, w) = self.forms(coeffs);
        u * v - w * w * self.inv_sin
    }

    pub fn gradient(&self, coeffs: &[f64]) -> Vec<f64> {
        let (u, v, w) = self.forms(coeffs);
        let tw = 2.0 * w * self.inv_sin;
        (0..self.l1.len()).map(|i| v * self.l1[i] + u * self.l2[i] - tw * self.l3[i]).collect()
    }

    /// Adds `weight · ∇²Jac` (constant, since Jac is quadratic) into `out`.
    pub fn add_hessian(&self, weight: f64, out: &mut Array2<f64>) {
        let n = self.l1.len();
        let w3 = 2.0 * weight * self.inv_sin;
        for i in 0..n {
            let (a1, a2, a3) = (weight * self.l1[i], weight * self.l2[i], w3 * self.l3[i]);
            for j in 0..n {
                out[[i, j]] += a1 * self.l2[j] + a2 * self.l1[j] - a3 * self.l3[j];
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSupport3D {
    degree: usize,
    coeffs: Vec<f64>,
}

impl SphericalSupport3D {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != sph_len(degree) {
            return Err(ShapeError::InvalidArgument(format!(
                "degree {degree} needs {} coefficients, got {}",
                sph_len(degree),
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(ShapeError::NonFinite(i));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self> {
        let root = (coeffs.len() as f64).sqrt().round() as usize;
        if root == 0 || root * root != coeffs.len() {
            return Err(ShapeError::InvalidArgument(format!(
                "{} is not a perfect square coefficient count",
                coeffs.len()
            )));
        }
        Self::new(root - 1, coeffs.to_vec())
    }

    /// Ball of the given radius centred at the origin.
    pub fn ball(radius: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; sph_len(degree)];
        coeffs[0] = radius * (4.0 * PI).sqrt();
        Self { degree, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.coeffs[sph_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: f64) {
        self.coeffs[sph_index(l, m)] = v;
    }

    /// Width `2 a_{0,0} Y_0^0` carried by the constant term.
    pub fn mean_width(&self) -> f64 {
        self.coeffs[0] / PI.sqrt()
    }

    pub fn sample(&self, phi: f64, psi: f64) -> HarmonicSample {
        HarmonicSample::new(self.degree, phi, psi)
    }

    /// Value or partial derivative of `p` at `(φ, ψ)`.
    pub fn eval(&self, phi: f64, psi: f64, deriv: SphDeriv) -> Result<f64> {
        if deriv.involves_phi() {
            check_pole(psi)?;
        }
        Ok(dot(self.sample(phi, psi).row(deriv), &self.coeffs))
    }

    /// Value at a unit direction.
    pub fn eval_direction(&self, u: [f64; 3]) -> f64 {
        let p = SpherePoint::from_vector(u);
        dot(&self.sample(p.phi, p.psi).y, &self.coeffs)
    }

    /// Boundary point whose outward normal is `n(φ, ψ)`:
    /// `p n + (p_φ / sin²ψ) n_φ + p_ψ n_ψ`.
    pub fn boundary_point(&self, phi: f64, psi: f64) -> Result<[f64; 3]> {
        check_pole(psi)?;
        let s = self.sample(phi, psi);
        Ok(boundary_point_from_sample(&s, &self.coeffs))
    }

    /// Surface Jacobian `Jac(φ, ψ)` of the boundary parametrization.
    pub fn surface_jacobian(&self, phi: f64, psi: f64) -> Result<f64> {
        check_pole(psi)?;
        Ok(self.sample(phi, psi).jacobian_rows().value(&self.coeffs))
    }
}

pub fn boundary_point_from_sample(s: &HarmonicSample, coeffs: &[f64]) -> [f64; 3] {
    let p = dot(&s.y, coeffs);
    let p_phi = dot(&s.y_phi, coeffs);
    let p_psi = dot(&s.y_psi, coeffs);
    let (sp, cp) = s.phi.sin_cos();
    let (ss, cs) = s.psi.sin_cos();
    let n = sphere_normal(s.phi, s.psi);
    let n_phi = [cp * ss, -sp * ss, 0.0];
    let n_psi = [sp * cs, cp * cs, -ss];
    let k = p_phi / (ss * ss);
    [
        p * n[0] + k * n_phi[0] + p_psi * n_psi[0],
        p * n[1] + k * n_phi[1] + p_psi * n_psi[1],
        p * n[2] + k * n_phi[2] + p_psi * n_psi[2],
    ]
}

fn check_pole(psi: f64) -> Result<()> {
    if !(DEFAULT_POLE_MARGIN..=PI - DEFAULT_POLE_MARGIN).contains(&psi) {
        return Err(ShapeError::PoleEvaluation { psi, margin: DEFAULT_POLE_MARGIN });
    }
    Ok(())
}

/// Basis values and Jacobian forms tabulated on a fixed grid, as dense
/// `points × coefficients` matrices.
#[derive(Debug, Clone)]
pub struct HarmonicGrid {
    pub degree: usize,
    pub grid: SphereGrid,
    pub y: Array2<f64>,
    pub l1: Array2<f64>,
    pub l2: Array2<f64>,
    pub l3: Array2<f64>,
    pub inv_sin: Vec<f64>,
}

impl HarmonicGrid {
    pub fn new(degree: usize, grid: &SphereGrid) -> Self {
        let rows = grid.len();
        let cols = sph_len(degree);
        let mut y = Array2::zeros((rows, cols));
        let mut l1 = Array2::zeros((rows, cols));
        let mut l2 = Array2::zeros((rows, cols));
        let mut l3 = Array2::zeros((rows, cols));
        let mut inv_sin = Vec::with_capacity(rows);
        for (i, p) in grid.points.iter().enumerate() {
            let s = HarmonicSample::new(degree, p.phi, p.psi);
            let j = s.jacobian_rows();
            for c in 0..cols {
                y[[i, c]] = s.y[c];
                l1[[i, c]] = j.l1[c];
                l2[[i, c]] = j.l2[c];
                l3[[i, c]] = j.l3[c];
            }
            inv_sin.push(j.inv_sin);
        }
        Self { degree, grid: grid.clone(), y, l1, l2, l3, inv_sin }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn coeff_len(&self) -> usize {
        self.y.ncols()
    }

    pub fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.coeff_len() {
            return Err(ShapeError::InvalidArgument(format!(
                "grid tabulated for {} coefficients, got {}",
                self.coeff_len(),
                coeffs.len()
            )));
        }
        Ok(())
    }

    /// Support-function values at every grid point.
    pub fn values(&self, coeffs: &[f64]) -> Vec<f64> {
        self.y.dot(&ndarray::ArrayView1::from(coeffs)).to_vec()
    }

    /// `(u, v, w)` forms at every grid point, `Jac = u v - w² / sin ψ`.
    pub fn forms(&self, coeffs: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let c = ndarray::ArrayView1::from(coeffs);
        (self.l1.dot(&c).to_vec(), self.l2.dot(&c).to_vec(), self.l3.dot(&c).to_vec())
    }

    pub fn jacobians(&self, coeffs: &[f64]) -> Vec<f64> {
        let (u, v, w) = self.forms(coeffs);
        (0..self.len()).map(|i| u[i] * v[i] - w[i] * w[i] * self.inv_sin[i]).collect()
    }

    /// Rows of `∂Jac_i / ∂a` for every grid point.
    pub fn jacobian_gradients(&self, coeffs: &[f64]) -> Array2<f64> {
        let (u, v, w) = self.forms(coeffs);
        let mut out = Array2::zeros(self.l1.raw_dim());
        for i in 0..self.len() {
            let tw = 2.0 * w[i] * self.inv_sin[i];
            let mut row = out.row_mut(i);
            row.scaled_add(v[i], &self.l1.row(i));
            row.scaled_add(u[i], &self.l2.row(i));
            row.scaled_add(-tw, &self.l3.row(i));
        }
        out
    }

    /// `Σ_i weight_i ∇²Jac_i`.
    pub fn weighted_jacobian_hessian(&self, weights: &[f64]) -> Array2<f64> {
        let scale = |m: &Array2<f64>, f: &dyn Fn(usize) -> f64| {
            let mut s = m.clone();
            for (i, mut row) in s.rows_mut().into_iter().enumerate() {
                row *= f(i);
            }
            s
        };
        let w1 = scale(&self.l1, &|i| weights[i]);
        let w3 = scale(&self.l3, &|i| 2.0 * weights[i] * self.inv_sin[i]);
        let cross = w1.t().dot(&self.l2);
        let mut h = &cross + &cross.t();
        h -= &w3.t().dot(&self.l3);
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    #[test]
    fn index_round_trip() {
        for l in 0..10usize {
            for m in -(l as i64)..=(l as i64) {
                let i = sph_index(l, m);
                assert_eq!(sph_lm(i), (l, m));
            }
        }
        assert_eq!(sph_index(0, 0), 0);
        assert_eq!(sph_index(1, -1), 1);
        assert_eq!(sph_index(2, 2), 8);
    }

    #[test]
    fn constant_harmonic_normalization() {
        let mut p = SphericalSupport3D::ball(0.0, 2);
        p.set(0, 0, 1.0);
        let v = p.eval(0.3, 1.7, SphDeriv::None).unwrap();
        assert!((v - 0.28209479177387814).abs() < 1e-15);
    }

    #[test]
    fn y10_at_pole() {
        let mut p = SphericalSupport3D::ball(0.0, 1);
        p.set(1, 0, 1.0);
        let v = p.eval(0.0, 0.0, SphDeriv::None).unwrap();
        assert!((v - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(matches!(p.eval(0.0, 0.0, SphDeriv::Phi), Err(ShapeError::PoleEvaluation { .. })));
    }

    #[test]
    fn gram_matrix_is_identity() {
        let degree = 4;
        let grid = SphereGrid::gauss_product(8, 12, DEFAULT_POLE_MARGIN).unwrap();
        let h = HarmonicGrid::new(degree, &grid);
        let n = sph_len(degree);
        for a in 0..n {
            for b in 0..n {
                let g: f64 = (0..grid.len()).map(|i| grid.weights[i] * h.y[[i, a]] * h.y[[i, b]]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({a},{b}) -> {g}");
            }
        }
    }

    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }

    #[test]
    fn jacobian_matches_cross_product_of_boundary_tangents() {
        let degree = 5;
        let mut p = SphericalSupport3D::ball(1.0, degree);
        for i in 4..sph_len(degree) {
            p.coeffs_mut()[i] = 0.02 * (((i * 7919) % 13) as f64 / 6.0 - 1.0);
        }
        let h = 1e-5;
        for k in 0..20 {
            let phi = -3.0 + 0.29 * k as f64;
            let psi = 0.2 + 0.135 * k as f64;
            let x = |a, b| p.boundary_point(a, b).unwrap();
            let dphi: Vec<f64> = (0..3).map(|c| (x(phi + h, psi)[c] - x(phi - h, psi)[c]) / (2.0 * h)).collect();
            let dpsi: Vec<f64> = (0..3).map(|c| (x(phi, psi + h)[c] - x(phi, psi - h)[c]) / (2.0 * h)).collect();
            let c = cross([dphi[0], dphi[1], dphi[2]], [dpsi[0], dpsi[1], dpsi[2]]);
            let area = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            let jac = p.surface_jacobian(phi, psi).unwrap();
            assert!((jac - area).abs() < 1e-5 * area, "k={k}: jac {jac} vs {area}");
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let degree = 6;
        let coeffs: Vec<f64> = (0..sph_len(degree)).map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.1).collect();
        let p = SphericalSupport3D::new(degree, coeffs).unwrap();
        let (phi, psi, h) = (0.7, 1.1, 1e-5);
        let f = |a: f64, b: f64| p.eval(a, b, SphDeriv::None).unwrap();
        let fd_phi = (f(phi + h, psi) - f(phi - h, psi)) / (2.0 * h);
        let fd_psi = (f(phi, psi + h) - f(phi, psi - h)) / (2.0 * h);
        let fd_pp = (f(phi + h, psi) - 2.0 * f(phi, psi) + f(phi - h, psi)) / (h * h);
        let fd_ss = (f(phi, psi + h) - 2.0 * f(phi, psi) + f(phi, psi - h)) / (h * h);
        let fd_ps = (f(phi + h, psi + h) - f(phi + h, psi - h) - f(phi - h, psi + h) + f(phi - h, psi - h))
            / (4.0 * h * h);
        let e = |d| p.eval(phi, psi, d).unwrap();
        assert!((fd_phi - e(SphDeriv::Phi)).abs() < 1e-7);
        assert!((fd_psi - e(SphDeriv::Psi)).abs() < 1e-7);
        assert!((fd_pp - e(SphDeriv::PhiPhi)).abs() < 1e-4);
        assert!((fd_ss - e(SphDeriv::PsiPsi)).abs() < 1e-4);
        assert!((fd_ps - e(SphDeriv::PhiPsi)).abs() < 1e-4);
    }
}
