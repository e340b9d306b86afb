use num_complex::Complex64 as C64;

use crate::kernel::radial;

/// Real part of an expansion `Σ c_j Φ_λ(x - y_j)`.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub dim: usize,
    pub lambda: f64,
    pub sources: Vec<[f64; 3]>,
    pub coeffs: Vec<C64>,
}

impl Eigenfunction {
    pub fn new(dim: usize, lambda: f64, sources: Vec<[f64; 3]>, coeffs: Vec<C64>) -> Self {
        Self { dim, lambda, sources, coeffs }
    }

    /// Complex value of the expansion; the eigenfunction is its real part.
    pub fn complex_value(&self, x: [f64; 3]) -> C64 {
        let k = self.lambda.sqrt();
        self.sources
            .iter()
            .zip(&self.coeffs)
            .map(|(y, c)| {
                let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
                c * radial(self.dim, k, r).0
            })
            .sum()
    }

    pub fn value(&self, x: [f64; 3]) -> f64 {
        self.complex_value(x).re
    }

    /// Value and gradient.
    pub fn value_and_gradient(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        let k = self.lambda.sqrt();
        let mut u = C64::new(0.0, 0.0);
        let mut g = [C64::new(0.0, 0.0); 3];
        for (y, c) in self.sources.iter().zip(&self.coeffs) {
            let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let (phi, dphi) = radial(self.dim, k, r);
            u += c * phi;
            let s = c * dphi / r;
            for a in 0..3 {
                g[a] += s * d[a];
            }
        }
        (u.re, g.map(|z| z.re))
    }

    pub fn normal_derivative(&self, x: [f64; 3], n: [f64; 3]) -> f64 {
        let (_, g) = self.value_and_gradient(x);
        g[0] * n[0] + g[1] * n[1] + g[2] * n[2]
    }

    pub fn scaled(mut self, t: f64) -> Self {
        for c in &mut self.coeffs {
            *c *= t;
        }
        self
    }
}
