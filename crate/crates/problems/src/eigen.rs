use std::f64::consts::PI;

use supportshape_core::functionals::{area_2d, GradedValue, VolumeFunctional};
use supportshape_core::{FourierSupport2D, Space, SphereGrid};
use supportshape_mfs::{branch_density, find_eigenvalues, Body, EigenResult, MfsConfig, MfsError};
use supportshape_nlp::{EvalError, Objective};

/// `λ_k(ω) · |ω|^{2/d}`, invariant under scaling, so a volume constraint
/// becomes a normalization at reporting time.
///
/// Every evaluation rescans the spectrum from the Faber–Krahn bound, so `k`
/// is the index in the true ordering rather than a tracked branch. Inside a
/// cluster (`λ_k` within `1e-6` relative of a neighbour) the gradient of the
/// `k`-th located eigenfunction stands in for the missing derivative.
pub struct EigenObjective {
    space: Space,
    k: usize,
    cfg: MfsConfig,
    volume: Option<VolumeFunctional>,
    normalized: bool,
}

/// One evaluated eigenvalue with its density-based gradient.
#[derive(Debug, Clone)]
pub struct EigenSample {
    pub lambda: f64,
    pub gradient: Vec<f64>,
    pub multiplicity: usize,
    pub gap: f64,
}

impl EigenObjective {
    pub fn new(space: Space, k: usize, cfg: MfsConfig) -> Result<Self, MfsError> {
        if k == 0 {
            return Err(MfsError::InvalidConfig("eigenvalue index is 1-based".into()));
        }
        cfg.validate()?;
        let volume = match space {
            Space::Planar { .. } => None,
            Space::Spherical { degree } => {
                Some(VolumeFunctional::new(degree, &SphereGrid::quadrature_for_degree(3 * degree)?))
            }
        };
        Ok(Self { space, k, cfg, volume, normalized: true })
    }

    /// Plain `λ_k`, for problems whose constraints already fix the scale.
    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn config(&self) -> &MfsConfig {
        &self.cfg
    }

    /// `λ_k` and `∂λ_k/∂a` at `coeffs`.
    pub fn eigenvalue(&self, coeffs: &[f64]) -> Result<EigenSample, MfsError> {
        let body = Body::from_coeffs(self.space, coeffs)?;
        let spectrum = find_eigenvalues(&body, None, self.k, &self.cfg)?;
        let e: &EigenResult = spectrum.eigenvalues.get(self.k - 1).ok_or_else(|| {
            MfsError::InvalidConfig(format!(
                "located {} eigenvalues, fewer than k = {}",
                spectrum.eigenvalues.len(),
                self.k
            ))
        })?;
        let gradient = branch_density(e, &body)?.coeff_gradient()?;
        Ok(EigenSample { lambda: e.lambda, gradient, multiplicity: e.multiplicity, gap: e.gap })
    }

    fn measure(&self, coeffs: &[f64]) -> Result<GradedValue, EvalError> {
        Ok(match &self.volume {
            None => area_2d(&FourierSupport2D::from_coeffs(coeffs)?),
            Some(v) => v.evaluate_unchecked(coeffs, false)?,
        })
    }
}

impl Objective for EigenObjective {
    fn evaluate(&self, coeffs: &[f64], _want_hessian: bool) -> Result<GradedValue, EvalError> {
        let s = self.eigenvalue(coeffs).map_err(|e| EvalError(e.to_string()))?;
        let lambda = GradedValue::new(s.lambda, s.gradient, None);
        if !self.normalized {
            return Ok(lambda);
        }
        let m = self.measure(coeffs)?;
        if !(m.value > 0.0) {
            return Err(EvalError(format!("non-positive measure {}", m.value)));
        }
        let e = 2.0 / self.space.dim() as f64;
        let scale = GradedValue::powf(&GradedValue::new(m.value, m.gradient, None), e);
        Ok(GradedValue::product(&lambda, &scale))
    }

    fn has_hessian(&self) -> bool {
        false
    }
}

/// Radius of the ball of unit measure.
pub fn unit_ball_radius(dim: usize) -> f64 {
    if dim == 2 {
        1.0 / PI.sqrt()
    } else {
        (3.0 / (4.0 * PI)).cbrt()
    }
}
