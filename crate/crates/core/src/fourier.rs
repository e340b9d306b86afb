//! Planar support functions as truncated Fourier series
//!
//! `p(θ) = a0 + Σ_{k=1}^N (a_k cos kθ + b_k sin kθ)`.
//!
//! Flat coefficient layout used everywhere in the workspace:
//! `[a0, a_1, …, a_N, b_1, …, b_N]`, length `2N + 1`.

use crate::error::{Result, ShapeError};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSupport2D {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Value of the `order`-th derivative of `cos(kθ)` (or `sin(kθ)` when
/// `sine` is set) at `θ`.
#[inline]
fn trig_derivative(k: f64, theta: f64, order: u32, sine: bool) -> f64 {
    // d/dθ cos = -k sin, d/dθ sin = k cos; the phase advances by π/2 per order.
    let scale = k.powi(order as i32);
    let phase = k * theta + f64::from(order) * std::f64::consts::FRAC_PI_2;
    if sine {
        scale * phase.sin()
    } else {
        scale * phase.cos()
    }
}

impl FourierSupport2D {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(ShapeError::InvalidArgument(format!(
                "cosine/sine lengths must match and be >= 1 (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        let s = Self { a0, a, b };
        if let Some(i) = s.to_coeffs().iter().position(|c| !c.is_finite()) {
            return Err(ShapeError::NonFinite(i));
        }
        Ok(s)
    }

    /// Disk of the given radius centred at the origin.
    pub fn disk(radius: f64, n: usize) -> Self {
        let n = n.max(1);
        Self { a0: radius, a: vec![0.0; n], b: vec![0.0; n] }
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() < 3 || coeffs.len().is_multiple_of(2) {
            return Err(ShapeError::InvalidArgument(format!(
                "Fourier coefficient vector must have odd length >= 3, got {}",
                coeffs.len()
            )));
        }
        let n = (coeffs.len() - 1) / 2;
        Self::new(coeffs[0], coeffs[1..=n].to_vec(), coeffs[n + 1..].to_vec())
    }

    pub fn to_coeffs(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.coeff_len());
        v.push(self.a0);
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn coeff_len(&self) -> usize {
        coeff_len(self.order())
    }

    /// `order`-th derivative of `p` at `θ` (0 gives `p` itself).
    pub fn eval(&self, theta: f64, order: u32) -> f64 {
        let mut acc = if order == 0 { self.a0 } else { 0.0 };
        for (i, (&ak, &bk)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (i + 1) as f64;
            if ak != 0.0 {
                acc += ak * trig_derivative(k, theta, order, false);
            }
            if bk != 0.0 {
                acc += bk * trig_derivative(k, theta, order, true);
            }
        }
        acc
    }

    /// Boundary point whose outward normal is `(cos θ, sin θ)`.
    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let p = self.eval(theta, 0);
        let dp = self.eval(theta, 1);
        let (s, c) = theta.sin_cos();
        [p * c - dp * s, p * s + dp * c]
    }

    /// `p + p''`: radius of curvature and speed of the boundary parametrization.
    pub fn radius_of_curvature(&self, theta: f64) -> f64 {
        let mut acc = self.a0;
        for (i, (&ak, &bk)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            acc += (1.0 - k * k) * (ak * c + bk * s);
        }
        acc
    }

    /// Arc length of the boundary from normal angle 0 to `θ`, i.e.
    /// `∫_0^θ (p + p'')`.
    pub fn arc_length(&self, theta: f64) -> f64 {
        let mut acc = self.a0 * theta;
        for (i, (&ak, &bk)) in self.a.iter().zip(&self.b).enumerate().skip(1) {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            acc += (1.0 - k * k) / k * (ak * s + bk * (1.0 - c));
        }
        acc
    }

    /// Same body shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut out = self.clone();
        out.a[0] += dx;
        out.b[0] += dy;
        out
    }

    /// Same body rotated counter-clockwise by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        // p_rot(θ) = p(θ - angle).
        let mut out = self.clone();
        for i in 0..self.order() {
            let k = (i + 1) as f64;
            let (s, c) = (k * angle).sin_cos();
            out.a[i] = self.a[i] * c - self.b[i] * s;
            out.b[i] = self.a[i] * s + self.b[i] * c;
        }
        out
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            a0: self.a0 * t,
            a: self.a.iter().map(|v| v * t).collect(),
            b: self.b.iter().map(|v| v * t).collect(),
        }
    }
}

pub fn coeff_len(order: usize) -> usize {
    2 * order + 1
}

/// Flat index of `a_k` (`k = 0` is the constant term).
pub fn cos_index(k: usize) -> usize {
    k
}

/// Flat index of `b_k`, `k >= 1`.
pub fn sin_index(order: usize, k: usize) -> usize {
    debug_assert!(k >= 1 && k <= order);
    order + k
}

/// Fourier index (frequency) carried by flat position `idx`.
pub fn frequency_of(order: usize, idx: usize) -> usize {
    if idx <= order {
        idx
    } else {
        idx - order
    }
}

/// Row of `d^order/dθ^order` of every basis function at `θ`, in flat layout.
pub fn basis_row(order_n: usize, theta: f64, deriv: u32) -> Vec<f64> {
    let mut row = vec![0.0; coeff_len(order_n)];
    row[0] = if deriv == 0 { 1.0 } else { 0.0 };
    for k in 1..=order_n {
        let kf = k as f64;
        row[cos_index(k)] = trig_derivative(kf, theta, deriv, false);
        row[sin_index(order_n, k)] = trig_derivative(kf, theta, deriv, true);
    }
    row
}

/// Row of `p + p''` basis values at `θ`: `1`, `(1-k²)cos kθ`, `(1-k²)sin kθ`.
pub fn curvature_row(order_n: usize, theta: f64) -> Vec<f64> {
    let mut row = vec![0.0; coeff_len(order_n)];
    row[0] = 1.0;
    for k in 1..=order_n {
        let kf = k as f64;
        let (s, c) = (kf * theta).sin_cos();
        row[cos_index(k)] = (1.0 - kf * kf) * c;
        row[sin_index(order_n, k)] = (1.0 - kf * kf) * s;
    }
    row
}
