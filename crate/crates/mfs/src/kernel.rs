//! Free-space Helmholtz fundamental solutions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::MfsError;

/// Distances below this are treated as the kernel's singular point.
pub const SINGULAR_RADIUS: f64 = 1e-12;

/// `H₀⁽¹⁾(z)` and its derivative `-H₁⁽¹⁾(z)` for real `z > 0`.
///
/// Reference values come from Temme's series (`z < 2`) and Steed's
/// continued fractions, both good to a few ulps; a plain asymptotic
/// expansion cannot reach 1e-10 near `z ≈ 8`. On `[1, 64)` the same values
/// are replayed from piecewise Chebyshev interpolants, an order of magnitude
/// cheaper and agreeing to ~1e-15.
pub fn hankel0(z: f64) -> (C64, C64) {
    let [j, y, jp, yp] = match table().eval(z) {
        Some(v) => v,
        None => hankel0_reference(z),
    };
    (C64::new(j, y), C64::new(jp, yp))
}

/// `[J₀, Y₀, J₀', Y₀']` straight from the special-function library.
pub fn hankel0_reference(z: f64) -> [f64; 4] {
    let (j, y, jp, yp) = puruspe::besseljy(0.0, z);
    [j, y, jp, yp]
}

const TABLE_START: f64 = 1.0;
const TABLE_END: f64 = 64.0;
const CHEB_DEGREE: usize = 22;

/// Chebyshev coefficients of `[J₀, Y₀, J₀', Y₀']` on unit intervals.
struct ChebTable {
    coeffs: Vec<[[f64; CHEB_DEGREE + 1]; 4]>,
}

fn table() -> &'static ChebTable {
    static TABLE: OnceLock<ChebTable> = OnceLock::new();
    TABLE.get_or_init(ChebTable::build)
}

impl ChebTable {
    fn build() -> Self {
        let n = CHEB_DEGREE + 1;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let intervals = (TABLE_END - TABLE_START) as usize;
        let coeffs = (0..intervals)
            .map(|i| {
                let mid = TABLE_START + i as f64 + 0.5;
                let vals: Vec<[f64; 4]> = nodes.iter().map(|x| hankel0_reference(mid + 0.5 * x)).collect();
                let mut c = [[0.0; CHEB_DEGREE + 1]; 4];
                for (f, cf) in c.iter_mut().enumerate() {
                    for (j, cj) in cf.iter_mut().enumerate() {
                        let s: f64 = (0..n)
                            .map(|k| vals[k][f] * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                            .sum();
                        *cj = s * if j == 0 { 1.0 } else { 2.0 } / n as f64;
                    }
                }
                c
            })
            .collect();
        Self { coeffs }
    }

    fn eval(&self, z: f64) -> Option<[f64; 4]> {
        if !(TABLE_START..TABLE_END).contains(&z) {
            return None;
        }
        let i = (z - TABLE_START) as usize;
        let x = 2.0 * (z - TABLE_START - i as f64) - 1.0;
        let c = &self.coeffs[i];
        let mut out = [0.0; 4];
        for (o, cf) in out.iter_mut().zip(c) {
            // Clenshaw
            let (mut b1, mut b2) = (0.0, 0.0);
            for &a in cf.iter().skip(1).rev() {
                let b0 = 2.0 * x * b1 - b2 + a;
                b2 = b1;
                b1 = b0;
            }
            *o = x * b1 - b2 + cf[0];
        }
        Some(out)
    }
}

/// Kernel `Φ(r)` and radial derivative `Φ'(r)` at wavenumber `k = √λ`.
#[inline]
pub(crate) fn radial(dim: usize, k: f64, r: f64) -> (C64, C64) {
    if dim == 2 {
        let (h, hp) = hankel0(k * r);
        let i4 = C64::new(0.0, 0.25);
        (i4 * h, i4 * k * hp)
    } else {
        let e = C64::from_polar(1.0 / (4.0 * PI * r), k * r);
        (e, e * C64::new(-1.0 / r, k))
    }
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check(dim: usize, lambda: f64, x: &[f64]) -> Result<f64, MfsError> {
    if dim != 2 && dim != 3 {
        return Err(MfsError::InvalidConfig(format!("dimension must be 2 or 3, got {dim}")));
    }
    if x.len() != dim {
        return Err(MfsError::InvalidConfig(format!("point has {} components in dimension {dim}", x.len())));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(MfsError::InvalidConfig(format!("λ must be positive, got {lambda}")));
    }
    let r = radius(x);
    if r < SINGULAR_RADIUS {
        return Err(MfsError::SingularPoint { radius: r });
    }
    Ok(r)
}

/// `(i/4) H₀⁽¹⁾(√λ |x|)` in the plane, `e^{i√λ|x|} / (4π|x|)` in space.
pub fn fundamental_solution(dim: usize, lambda: f64, x: &[f64]) -> Result<C64, MfsError> {
    let r = check(dim, lambda, x)?;
    Ok(radial(dim, lambda.sqrt(), r).0)
}

/// Gradient of [`fundamental_solution`] with respect to `x`.
pub fn fundamental_gradient(dim: usize, lambda: f64, x: &[f64]) -> Result<Vec<C64>, MfsError> {
    let r = check(dim, lambda, x)?;
    let d = radial(dim, lambda.sqrt(), r).1;
    Ok(x.iter().map(|xi| d * (xi / r)).collect())
}
