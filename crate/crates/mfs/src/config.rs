use crate::MfsError;

/// Discretization of the method of fundamental solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct MfsConfig {
    /// Number of sources `n`, one per source-anchor boundary point.
    pub n_sources: usize,
    /// Number of boundary collocation points `m`.
    pub n_collocation: usize,
    /// Number of interior points `p`.
    pub n_interior: usize,
    /// Source offset along the outward normal, as a fraction of the mean width.
    pub offset: f64,
    /// Seed of the interior point sampler.
    pub seed: u64,
    /// A local minimum of `σ₁` below this is accepted as an eigenvalue;
    /// further singular values below it count towards its multiplicity.
    pub accept: f64,
    /// Spectrum scan resolution: grid points per mean eigenvalue spacing.
    pub scan_density: f64,
}

impl MfsConfig {
    pub fn planar() -> Self {
        Self { n_sources: 120, n_collocation: 300, n_interior: 40, offset: 0.15, seed: 0, accept: 1e-3, scan_density: 12.0 }
    }

    pub fn spatial() -> Self {
        Self { n_sources: 400, n_collocation: 1000, n_interior: 80, ..Self::planar() }
    }

    pub fn for_dim(dim: usize) -> Self {
        if dim == 2 {
            Self::planar()
        } else {
            Self::spatial()
        }
    }

    pub fn with_sizes(mut self, n: usize, m: usize, p: usize) -> Self {
        self.n_sources = n;
        self.n_collocation = m;
        self.n_interior = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), MfsError> {
        let bad = |m: String| Err(MfsError::InvalidConfig(m));
        if self.n_sources == 0 || self.n_interior == 0 {
            return bad("need at least one source and one interior point".into());
        }
        if self.n_sources >= self.n_collocation {
            return bad(format!("n = {} must be below m = {}", self.n_sources, self.n_collocation));
        }
        if self.n_interior >= self.n_collocation {
            return bad(format!("p = {} must be below m = {}", self.n_interior, self.n_collocation));
        }
        if !(self.offset > 0.0 && self.offset.is_finite()) {
            return bad(format!("source offset must be positive, got {}", self.offset));
        }
        if !(self.accept > 0.0 && self.accept < 1.0) {
            return bad(format!("acceptance threshold must lie in (0, 1), got {}", self.accept));
        }
        if !(self.scan_density >= 1.0) {
            return bad(format!("scan density must be at least 1, got {}", self.scan_density));
        }
        Ok(())
    }
}
