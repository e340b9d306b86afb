use ndarray::{s, Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Diag, SolveTriangular, QR, SVD, UPLO};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::{Body, Membership};
use crate::eigenfunction::Eigenfunction;
use crate::kernel::{radial, SINGULAR_RADIUS};
use crate::{MfsConfig, MfsError};

/// Condition estimate of `R` above which the basis is declared degenerate.
pub const MAX_CONDITION: f64 = 1e14;

/// Interior points are drawn from this homothet of the body about its
/// Steiner point, keeping them away from the boundary where `u` vanishes.
const INTERIOR_SHRINK: f64 = 0.9;

/// Sources, collocation and interior points for one body.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub dim: usize,
    pub sources: Vec<[f64; 3]>,
    pub collocation: Vec<[f64; 3]>,
    pub interior: Vec<[f64; 3]>,
}

/// Smallest singular values of `Q₁` with the matching expansions.
#[derive(Debug, Clone)]
pub struct Modes {
    pub lambda: f64,
    pub sigmas: Vec<f64>,
    pub functions: Vec<Eigenfunction>,
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

impl Discretization {
    pub fn new(body: &Body, cfg: &MfsConfig) -> Result<Self, MfsError> {
        cfg.validate()?;
        let alpha = cfg.offset * body.mean_width();
        let sources = body
            .boundary_samples(cfg.n_sources, 0.0)?
            .into_iter()
            .map(|b| [0, 1, 2].map(|a| b.point[a] + alpha * b.normal[a]))
            .collect();
        let collocation = body.boundary_samples(cfg.n_collocation, 0.5)?.into_iter().map(|b| b.point).collect();
        let interior = sample_interior(body, cfg.n_interior, cfg.seed)?;
        Ok(Self { dim: body.dim(), sources, collocation, interior })
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    /// `A(λ) = [M₁; M₂]` in column-major storage.
    pub fn assemble(&self, lambda: f64) -> Result<Array2<C64>, MfsError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MfsError::InvalidConfig(format!("λ must be positive, got {lambda}")));
        }
        let k = lambda.sqrt();
        let rows: Vec<&[f64; 3]> = self.collocation.iter().chain(&self.interior).collect();
        let mut a = Array2::zeros((rows.len(), self.sources.len()).f());
        for (j, y) in self.sources.iter().enumerate() {
            for (i, x) in rows.iter().enumerate() {
                let r = dist(x, y);
                if r < SINGULAR_RADIUS {
                    return Err(MfsError::SingularPoint { radius: r });
                }
                a[[i, j]] = radial(self.dim, k, r).0;
            }
        }
        Ok(a)
    }

    fn factor(&self, lambda: f64) -> Result<(Array2<C64>, Array2<C64>), MfsError> {
        let (q, r) = self.assemble(lambda)?.qr()?;
        let diag: Vec<f64> = r.diag().iter().map(|z| z.norm()).collect();
        let hi = diag.iter().cloned().fold(0.0, f64::max);
        let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(MfsError::RankDeficiency { condition });
        }
        Ok((q, r))
    }

    /// Singular values of `Q₁(λ)`, ascending.
    pub fn singular_values(&self, lambda: f64) -> Result<Vec<f64>, MfsError> {
        let (q, _) = self.factor(lambda)?;
        let q1 = q.slice(s![..self.collocation.len(), ..]).to_owned();
        let (_, sv, _) = q1.svd(false, false)?;
        let mut out = sv.to_vec();
        out.reverse();
        Ok(out)
    }

    /// Subspace angle `σ₁(λ)`, the smallest singular value of `Q₁(λ)`.
    pub fn sigma1(&self, lambda: f64) -> Result<f64, MfsError> {
        Ok(self.singular_values(lambda)?[0])
    }

    /// The `count` smallest singular values and their expansions
    /// `Σ c_j Φ(· - y_j)`, each rotated to be real in the interior.
    pub fn modes(&self, lambda: f64, count: usize) -> Result<Modes, MfsError> {
        let (q, r) = self.factor(lambda)?;
        let m = self.collocation.len();
        let q1 = q.slice(s![..m, ..]).to_owned();
        let (_, sv, vt) = q1.svd(false, true)?;
        let vt = vt.expect("requested");
        let n = sv.len();
        let count = count.clamp(1, n);
        let q2 = q.slice(s![m.., ..]);
        let mut sigmas = Vec::with_capacity(count);
        let mut functions = Vec::with_capacity(count);
        for idx in (n - count..n).rev() {
            let v: Array1<C64> = vt.row(idx).mapv(|z| z.conj());
            let interior = q2.dot(&v);
            let s2: C64 = interior.iter().map(|z| z * z).sum();
            let phase = C64::from_polar(1.0, -0.5 * s2.arg());
            let c = r.solve_triangular(UPLO::Upper, Diag::NonUnit, &v)?.mapv(|z| z * phase);
            sigmas.push(sv[idx]);
            functions.push(Eigenfunction::new(self.dim, lambda, self.sources.clone(), c.to_vec()));
        }
        Ok(Modes { lambda, sigmas, functions })
    }
}

fn sample_interior(body: &Body, count: usize, seed: u64) -> Result<Vec<[f64; 3]>, MfsError> {
    let test = Membership::new(body)?;
    let c = body.steiner_point();
    let (lo, hi) = Membership::bounds(body);
    let dim = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let tries = 1000 * count;
    for _ in 0..tries {
        if out.len() == count {
            break;
        }
        let mut x = [0.0; 3];
        for a in 0..dim {
            let t: f64 = rng.random();
            x[a] = c[a] + INTERIOR_SHRINK * (lo[a] + t * (hi[a] - lo[a]) - c[a]);
        }
        let stretched = [0, 1, 2].map(|a| c[a] + (x[a] - c[a]) / INTERIOR_SHRINK);
        if test.excess(stretched) < 0.0 {
            out.push(x);
        }
    }
    if out.len() < count {
        return Err(MfsError::InteriorSampling { wanted: count, tries });
    }
    Ok(out)
}
