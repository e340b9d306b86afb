use serde::{Deserialize, Serialize};
use supportshape_mfs::MfsConfig;

/// Problem parameters; every field falls back to a per-problem default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Constant width `w` (constant-width problems) or the width bound.
    pub width: Option<f64>,
    /// Area weight of `J_γ`.
    pub gamma: Option<f64>,
    /// Eigenvalue index, 1-based.
    pub k: Option<usize>,
    /// Truncation: Fourier order or harmonic degree.
    pub degree: Option<usize>,
    /// Convexity sample count `M` (planar) or `M_d` (spatial).
    pub grid: Option<usize>,
    /// Number of width directions (pairs of antipodes).
    pub width_grid: Option<usize>,
    /// 2 or 3 where a problem exists in both.
    pub dim: Option<usize>,
    /// `square`, `triangle`, `tetrahedron`, `cube`, `octahedron`, `dodecahedron`.
    pub container: Option<String>,
    /// Rotor container: `polygon:<n>`, `tetrahedron`, `octahedron`, `cube`.
    pub rotor: Option<String>,
    /// Inradius of rotor and Cheeger containers.
    pub inradius: Option<f64>,
    /// Restrict free coefficients to these degrees (besides the pattern).
    pub degrees: Option<Vec<usize>>,
    /// Seed of the default start.
    pub seed: Option<u64>,
    pub mfs: Option<MfsParams>,
}

/// Overrides for the eigenvalue solver inside eigenvalue objectives.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfsParams {
    pub sources: Option<usize>,
    pub collocation: Option<usize>,
    pub interior: Option<usize>,
    pub offset: Option<f64>,
    pub scan_density: Option<f64>,
}

impl MfsParams {
    pub fn apply(&self, mut cfg: MfsConfig) -> MfsConfig {
        if let Some(n) = self.sources {
            cfg.n_sources = n;
        }
        if let Some(m) = self.collocation {
            cfg.n_collocation = m;
        }
        if let Some(p) = self.interior {
            cfg.n_interior = p;
        }
        if let Some(a) = self.offset {
            cfg.offset = a;
        }
        if let Some(d) = self.scan_density {
            cfg.scan_density = d;
        }
        cfg
    }
}

impl Params {
    pub fn with_width(mut self, w: f64) -> Self {
        self.width = Some(w);
        self
    }

    pub fn with_gamma(mut self, g: f64) -> Self {
        self.gamma = Some(g);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_degree(mut self, n: usize) -> Self {
        self.degree = Some(n);
        self
    }

    pub fn with_grid(mut self, m: usize) -> Self {
        self.grid = Some(m);
        self
    }

    pub fn with_dim(mut self, d: usize) -> Self {
        self.dim = Some(d);
        self
    }

    pub fn with_container(mut self, c: &str) -> Self {
        self.container = Some(c.into());
        self
    }

    pub fn with_rotor(mut self, r: &str) -> Self {
        self.rotor = Some(r.into());
        self
    }

    pub fn with_degrees(mut self, d: &[usize]) -> Self {
        self.degrees = Some(d.to_vec());
        self
    }

    pub fn with_seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }
}
