#![allow(dead_code)]

use supportshape_mfs::MfsConfig;

/// `J_n(x)` by its power series; fine for `x < 12` in double precision.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..80 {
        term *= -h * h / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Root of `f` in `[a, b]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First positive zero of `J_n` past `from`.
pub fn bessel_zero(n: u32, from: f64) -> f64 {
    let mut a = from;
    while bessel_j_series(n, a) * bessel_j_series(n, a + 0.1) > 0.0 {
        a += 0.1;
    }
    bisect(|x| bessel_j_series(n, x), a, a + 0.1)
}

pub fn planar() -> MfsConfig {
    MfsConfig::planar().with_sizes(80, 200, 30)
}

pub fn spatial() -> MfsConfig {
    let mut cfg = MfsConfig::spatial().with_sizes(150, 400, 40);
    cfg.offset = 0.4;
    cfg
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
