//! Normalized associated Legendre functions `C_l^m P_l^m(cos ψ)` and their
//! first two derivatives in `ψ`.
//!
//! No Condon-Shortley phase: `P_1^1(cos ψ) = sin ψ`. Values are generated by
//! the normalized three-term recurrence in `l` for each order `m`, seeded from
//! the sectoral diagonal, which stays in range far beyond the degrees used
//! here. The ψ-derivatives use the ladder identity
//! `dP_l^m/dψ = ½[(l+m)(l-m+1) P_l^{m-1} - P_l^{m+1}]`, which has no `1/sin ψ`
//! factor and is therefore valid at the poles.

use std::f64::consts::PI;

/// Triangular table indexed by `(l, m)` with `0 <= m <= l <= degree`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    degree: usize,
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl LegendreTable {
    pub fn new(degree: usize, psi: f64) -> Self {
        let len = tri_index(degree, degree) + 1;
        let (s, x) = psi.sin_cos();
        let mut value = vec![0.0; len];

        let mut diag = (1.0 / (4.0 * PI)).sqrt();
        for m in 0..=degree {
            if m > 0 {
                let mf = m as f64;
                diag *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            value[tri_index(m, m)] = diag;
            if m < degree {
                value[tri_index(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * diag;
            }
            for l in (m + 2)..=degree {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lm1 = lf - 1.0;
                let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
                value[tri_index(l, m)] =
                    a * (x * value[tri_index(l - 1, m)] - b * value[tri_index(l - 2, m)]);
            }
        }

        let d1 = ladder(degree, &value);
        let d2 = ladder(degree, &d1);
        Self { degree, value, d1, d2 }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.value[tri_index(l, m)]
    }
}

/// Applies the ψ-derivative ladder operator to a full triangular table.
fn ladder(degree: usize, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for l in 1..=degree {
        let lf = l as f64;
        out[tri_index(l, 0)] = -(lf * (lf + 1.0)).sqrt() * f[tri_index(l, 1)];
        for m in 1..=l {
            let mf = m as f64;
            let down = ((lf + mf) * (lf - mf + 1.0)).sqrt() * f[tri_index(l, m - 1)];
            let up = if m < l {
                ((lf - mf) * (lf + mf + 1.0)).sqrt() * f[tri_index(l, m + 1)]
            } else {
                0.0
            };
            out[tri_index(l, m)] = 0.5 * (down - up);
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
