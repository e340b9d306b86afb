use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use supportshape_core::constraints::{
    constant_width_pattern, convexity_2d, convexity_3d, default_convexity_points, diameter_bounds,
    inclusion_constraints, rotor_pattern, CoefficientPattern, Container, LinearConstraints, NonlinearConstraints,
    RotorKind,
};
use supportshape_core::functionals::{area_2d, area_3d, perimeter_2d, volume_cw_3d, GradedValue, VolumeFunctional};
use supportshape_core::{
    make_sphere_grid, Direction, FourierSupport2D, Polytope, Space, SphereGrid, SphericalSupport3D,
    DEFAULT_POLE_MARGIN,
};
use supportshape_mfs::MfsConfig;
use supportshape_nlp::{multistart, FnObjective, NlpProblem, Objective, SolveError, SolveOptions, StartOutcome};

use crate::eigen::{unit_ball_radius, EigenObjective};
use crate::reference::{reference, reuleaux_area, Reference};
use crate::{CatalogError, Params};

pub const PROBLEMS: [&str; 9] = [
    "min_area_cw_2d",
    "min_vol_cw_3d",
    "eig_convex",
    "eig_cw_3d",
    "rotor_min",
    "j_gamma",
    "min_area_width_3d",
    "cheeger_2d",
    "cheeger",
];

/// What a catalog problem minimizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    /// Area at constant width `w`.
    ConstantWidthArea { width: f64 },
    /// Volume at constant width `w`.
    ConstantWidthVolume { width: f64 },
    /// `λ_k |ω|^{2/d}` over convex bodies, or `λ_k` at constant width.
    Eigenvalue { k: usize, constant_width: Option<f64> },
    /// Area or volume of a rotor with the given admissible degrees.
    Rotor { rotor: String, inradius: f64, degrees: Vec<usize> },
    /// `γ |ω| - H¹(∂ω)` at diameter `≤ width`.
    JGamma { gamma: f64, width: f64 },
    /// Surface area at width `≥ width` in every direction.
    WidthBoundedArea { width: f64 },
    /// Boundary measure over volume inside a container.
    Cheeger { container: String, inradius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub dim: usize,
    /// Fourier order or harmonic degree.
    pub degree: usize,
    /// Convexity samples.
    pub grid: usize,
    /// Width directions, where width rows are present.
    pub width_grid: Option<usize>,
    pub objective: ObjectiveSpec,
    /// Reference optimum for these parameters, if one is known.
    pub reference: Option<Reference>,
}

/// A built catalog problem: the solver problem at its default start plus
/// the recipe for further starts.
#[derive(Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub space: Space,
    pub nlp: NlpProblem,
    /// Recommended solver options.
    pub options: SolveOptions,
    /// Recommended number of multistarts.
    pub starts: usize,
    /// Seed of the default start.
    pub seed: u64,
    base: Vec<f64>,
    amplitude: f64,
    /// Length scale of start perturbations.
    scale: f64,
    mfs: Option<MfsConfig>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem").field("spec", &self.spec).field("nlp", &self.nlp).finish()
    }
}

impl Problem {
    /// Start drawn from `rng`: the base body with every free coefficient of
    /// degree `l >= 2` perturbed by up to `amplitude · scale / (1 + l)²`.
    /// The perturbation is halved until the start is no less feasible than
    /// the base, so high truncations still start from a convex body.
    pub fn random_start(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut delta = vec![0.0; self.base.len()];
        for &i in &self.nlp.pattern.free {
            let l = self.space.degree_of(i);
            if l >= 2 {
                let d = (1.0 + l as f64).powi(2);
                delta[i] = self.amplitude * self.scale * rng.random_range(-1.0..=1.0) / d;
            }
        }
        let allowed = self.nlp.max_violation(&self.base).max(0.0);
        let mut t = 1.0;
        loop {
            let x: Vec<f64> = self.base.iter().zip(&delta).map(|(b, d)| b + t * d).collect();
            if t < 1e-3 || self.nlp.max_violation(&x) <= allowed {
                return x;
            }
            t *= 0.5;
        }
    }

    /// The problem started from the seeded start.
    pub fn with_seed(&self, seed: u64) -> NlpProblem {
        let mut p = self.nlp.clone();
        p.start = self.random_start(&mut ChaCha8Rng::seed_from_u64(seed));
        p
    }

    /// Multistart batch; start `i` uses seed `seed + i`.
    pub fn solve(&self, n_starts: usize, seed: u64, opts: &SolveOptions) -> Vec<StartOutcome> {
        let factory = |rng: &mut ChaCha8Rng| {
            let mut p = self.nlp.clone();
            p.start = self.random_start(rng);
            Ok::<_, SolveError>(p)
        };
        multistart(factory, n_starts, seed, opts)
    }

    pub fn value(&self, coeffs: &[f64]) -> Result<f64, SolveError> {
        self.nlp.objective.evaluate(coeffs, false).map(|g| g.value).map_err(|e| SolveError::Evaluation(e.to_string()))
    }

    /// Eigenvalue solver settings of eigenvalue objectives.
    pub fn mfs_config(&self) -> Option<&MfsConfig> {
        self.mfs.as_ref()
    }

    /// Coefficients in reporting form: planar bodies rotated so their width
    /// maximum sits at `θ = 0`; scale-invariant eigenvalue optima rescaled
    /// to unit measure.
    pub fn canonical(&self, coeffs: &[f64]) -> Result<Vec<f64>, CatalogError> {
        let mut c = coeffs.to_vec();
        if let ObjectiveSpec::Eigenvalue { constant_width: None, .. } = self.spec.objective {
            let m = measure(self.space, &c)?;
            let t = m.powf(-1.0 / self.spec.dim as f64);
            c.iter_mut().for_each(|v| *v *= t);
        }
        if self.spec.dim == 2 {
            c = canonical_rotation_2d(&c)?;
        }
        Ok(c)
    }
}

fn measure(space: Space, c: &[f64]) -> Result<f64, CatalogError> {
    Ok(match space {
        Space::Planar { .. } => area_2d(&FourierSupport2D::from_coeffs(c)?).value,
        Space::Spherical { degree } => {
            VolumeFunctional::new(degree, &SphereGrid::quadrature_for_degree(3 * degree)?).evaluate_unchecked(c, false)?.value
        }
    })
}

/// Rotation putting the maximum of the width function at `θ = 0`.
pub fn canonical_rotation_2d(coeffs: &[f64]) -> Result<Vec<f64>, CatalogError> {
    let p = FourierSupport2D::from_coeffs(coeffs)?;
    let width = |t: f64| p.eval(t, 0) + p.eval(t + PI, 0);
    // the width has period π
    let samples = 4096;
    let h = PI / samples as f64;
    let best = (0..samples).max_by(|&a, &b| width(a as f64 * h).total_cmp(&width(b as f64 * h))).unwrap_or(0);
    let t = best as f64 * h;
    let (l, c, r) = (width(t - h), width(t), width(t + h));
    let curv = l - 2.0 * c + r;
    let t = if curv < 0.0 { t + 0.5 * h * (l - r) / curv } else { t };
    Ok(p.rotated(-t).to_coeffs())
}

impl Params {
    fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        mark(self.width.is_some(), "width");
        mark(self.gamma.is_some(), "gamma");
        mark(self.k.is_some(), "k");
        mark(self.degree.is_some(), "degree");
        mark(self.grid.is_some(), "grid");
        mark(self.width_grid.is_some(), "width_grid");
        mark(self.dim.is_some(), "dim");
        mark(self.container.is_some(), "container");
        mark(self.rotor.is_some(), "rotor");
        mark(self.inradius.is_some(), "inradius");
        mark(self.degrees.is_some(), "degrees");
        mark(self.mfs.is_some(), "mfs");
        out
    }

    fn accept_only(&self, name: &str, allowed: &[&str]) -> Result<(), CatalogError> {
        match self.set_fields().into_iter().find(|f| !allowed.contains(f)) {
            Some(f) => Err(CatalogError::InvalidParams(format!(
                "{name} takes no parameter `{f}` (accepted: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CatalogError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CatalogError::InvalidParams(format!("{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, CatalogError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CatalogError::InvalidParams(format!("{name} must be at least {min}, got {v}")))
    }
}

/// Builds the named catalog problem.
pub fn build(name: &str, params: &Params) -> Result<Problem, CatalogError> {
    let seed = params.seed.unwrap_or(0);
    let mut problem = match name {
        "min_area_cw_2d" => min_area_cw_2d(params),
        "min_vol_cw_3d" => min_vol_cw_3d(params),
        "eig_convex" => eig_convex(params),
        "eig_cw_3d" => eig_cw_3d(params),
        "rotor_min" => rotor_min(params),
        "j_gamma" => j_gamma(params),
        "min_area_width_3d" => min_area_width_3d(params),
        "cheeger_2d" => cheeger(params, 2),
        "cheeger" => cheeger(params, params.dim.unwrap_or(3)),
        _ => Err(CatalogError::UnknownProblem { name: name.into(), known: PROBLEMS.to_vec() }),
    }?;
    problem.seed = seed;
    problem.nlp.start = problem.random_start(&mut ChaCha8Rng::seed_from_u64(seed));
    problem.nlp.validate().map_err(|e| CatalogError::InvalidParams(e.to_string()))?;
    Ok(problem)
}

struct Parts {
    spec: ProblemSpec,
    space: Space,
    objective: Arc<dyn Objective>,
    pattern: CoefficientPattern,
    linear: Option<LinearConstraints>,
    nonlinear: Option<Arc<dyn NonlinearConstraints>>,
    base: Vec<f64>,
    amplitude: f64,
    scale: f64,
    starts: usize,
    options: SolveOptions,
    mfs: Option<MfsConfig>,
}

impl Parts {
    fn finish(self) -> Problem {
        let mut nlp = NlpProblem::new(self.objective, self.pattern, self.base.clone());
        if let Some(l) = self.linear {
            nlp = nlp.with_linear(l);
        }
        if let Some(g) = self.nonlinear {
            nlp = nlp.with_nonlinear(g);
        }
        Problem {
            spec: self.spec,
            space: self.space,
            nlp,
            options: self.options,
            starts: self.starts,
            seed: 0,
            base: self.base,
            amplitude: self.amplitude,
            scale: self.scale,
            mfs: self.mfs,
        }
    }
}

fn planar_objective(f: impl Fn(&FourierSupport2D) -> GradedValue + Send + Sync + 'static) -> Arc<dyn Objective> {
    Arc::new(FnObjective::new(move |x: &[f64], _| Ok(f(&FourierSupport2D::from_coeffs(x)?))))
}

fn spatial_objective(f: impl Fn(&SphericalSupport3D) -> GradedValue + Send + Sync + 'static) -> Arc<dyn Objective> {
    Arc::new(FnObjective::new(move |x: &[f64], _| Ok(f(&SphericalSupport3D::from_coeffs(x)?))))
}

/// Base body: the ball of radius `r` with every other coefficient zero
/// (fixed entries from the pattern).
fn ball_start(space: Space, pattern: &CoefficientPattern, r: f64) -> Vec<f64> {
    let mut x = pattern.expand(&vec![0.0; pattern.free_len()]).expect("matching length");
    if !pattern.fixed.contains_key(&0) {
        x[0] = space.constant_for_radius(r);
    }
    x
}

fn convexity_rows_3d(degree: usize, grid: usize) -> Result<Arc<dyn NonlinearConstraints>, CatalogError> {
    let g = make_sphere_grid(grid, DEFAULT_POLE_MARGIN)?;
    Ok(Arc::new(convexity_3d(degree, &g)?))
}

fn default_grid_3d(degree: usize) -> usize {
    default_convexity_points(degree).max(800)
}

fn min_area_cw_2d(params: &Params) -> Result<Problem, CatalogError> {
    let name = "min_area_cw_2d";
    params.accept_only(name, &["width", "degree", "grid"])?;
    let w = positive("width", params.width.unwrap_or(2.0))?;
    let order = at_least("degree", params.degree.unwrap_or(50), 3)?;
    let m = at_least("grid", params.grid.unwrap_or(8 * order), 2 * order)?;
    let space = Space::Planar { order };
    let pattern = constant_width_pattern(space, w).pin_translations(space);
    let reference = reference(name).map(|r| r.rescaled((w / 2.0).powi(2)));
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim: 2,
            degree: order,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::ConstantWidthArea { width: w },
            reference,
        },
        space,
        objective: planar_objective(area_2d),
        base: ball_start(space, &pattern, w / 2.0),
        pattern,
        linear: Some(convexity_2d(order, m)?),
        nonlinear: None,
        amplitude: 0.1,
        scale: w,
        starts: 1,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

fn min_vol_cw_3d(params: &Params) -> Result<Problem, CatalogError> {
    let name = "min_vol_cw_3d";
    params.accept_only(name, &["width", "degree", "grid"])?;
    let w = positive("width", params.width.unwrap_or(1.0))?;
    let degree = at_least("degree", params.degree.unwrap_or(9), 3)?;
    let m = at_least("grid", params.grid.unwrap_or(default_grid_3d(degree)), 12)?;
    let space = Space::Spherical { degree };
    let pattern = constant_width_pattern(space, w).pin_translations(space);
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim: 3,
            degree,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::ConstantWidthVolume { width: w },
            reference: reference(name).map(|r| r.rescaled(w.powi(3))),
        },
        space,
        objective: spatial_objective(move |p| volume_cw_3d(p, w)),
        base: ball_start(space, &pattern, w / 2.0),
        pattern,
        linear: None,
        nonlinear: Some(convexity_rows_3d(degree, m)?),
        amplitude: 0.1,
        scale: w,
        starts: 10,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

/// Desk-scale eigenvalue solver settings for optimization loops.
pub fn loop_mfs_config(dim: usize) -> MfsConfig {
    if dim == 2 {
        MfsConfig::planar().with_sizes(80, 200, 30)
    } else {
        MfsConfig { offset: 0.4, ..MfsConfig::spatial().with_sizes(150, 400, 40) }
    }
}

/// Options for gradient-only eigenvalue objectives: eigenvalues are only
/// accurate to ~1e-8 relative, so the audit needs a wider step and a
/// looser tolerance.
fn eigen_options() -> SolveOptions {
    SolveOptions { audit_step: 1e-4, audit_tol: 1e-2, max_iter: 150, tol_kkt: 1e-5, ..SolveOptions::default() }
}

fn eig_convex(params: &Params) -> Result<Problem, CatalogError> {
    let name = "eig_convex";
    params.accept_only(name, &["k", "degree", "grid", "dim", "mfs"])?;
    let dim = params.dim.unwrap_or(2);
    let k = at_least("k", params.k.unwrap_or(2), 1)?;
    let (space, degree, m, linear, nonlinear) = match dim {
        2 => {
            let order = at_least("degree", params.degree.unwrap_or(20), 2)?;
            let m = at_least("grid", params.grid.unwrap_or(8 * order), 2 * order)?;
            (Space::Planar { order }, order, m, Some(convexity_2d(order, m)?), None)
        }
        3 => {
            let degree = at_least("degree", params.degree.unwrap_or(10), 2)?;
            let m = at_least("grid", params.grid.unwrap_or(default_convexity_points(degree)), 12)?;
            (Space::Spherical { degree }, degree, m, None, Some(convexity_rows_3d(degree, m)?))
        }
        d => return Err(CatalogError::InvalidParams(format!("dim must be 2 or 3, got {d}"))),
    };
    let cfg = params.mfs.clone().unwrap_or_default().apply(loop_mfs_config(dim));
    let objective = EigenObjective::new(space, k, cfg.clone())?;
    // the scale is a gauge: fix it at the unit-measure ball
    let r = unit_ball_radius(dim);
    let pattern =
        CoefficientPattern::all_free(space.coeff_len()).fix(0, space.constant_for_radius(r)).pin_translations(space);
    let key = format!("eig_convex_{dim}d_k{k}");
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim,
            degree,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::Eigenvalue { k, constant_width: None },
            reference: reference(&key),
        },
        space,
        objective: Arc::new(objective),
        base: ball_start(space, &pattern, r),
        pattern,
        linear,
        nonlinear,
        amplitude: 0.3,
        scale: 2.0 * r,
        starts: 3,
        options: eigen_options(),
        mfs: Some(cfg),
    }
    .finish())
}

fn eig_cw_3d(params: &Params) -> Result<Problem, CatalogError> {
    let name = "eig_cw_3d";
    params.accept_only(name, &["k", "width", "degree", "grid", "mfs"])?;
    let k = at_least("k", params.k.unwrap_or(10), 1)?;
    let w = positive("width", params.width.unwrap_or(2.0))?;
    let degree = at_least("degree", params.degree.unwrap_or(10), 3)?;
    let m = at_least("grid", params.grid.unwrap_or(default_convexity_points(degree)), 12)?;
    let space = Space::Spherical { degree };
    let cfg = params.mfs.clone().unwrap_or_default().apply(loop_mfs_config(3));
    let objective = EigenObjective::new(space, k, cfg.clone())?.unnormalized();
    let pattern = constant_width_pattern(space, w).pin_translations(space);
    let key = format!("eig_cw_3d_k{k}");
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim: 3,
            degree,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::Eigenvalue { k, constant_width: Some(w) },
            // λ scales like w⁻²; the reference is at width 2
            reference: reference(&key).map(|r| r.rescaled(4.0 / (w * w))),
        },
        space,
        objective: Arc::new(objective),
        base: ball_start(space, &pattern, w / 2.0),
        pattern,
        linear: None,
        nonlinear: Some(convexity_rows_3d(degree, m)?),
        amplitude: 0.1,
        scale: w,
        starts: 1,
        options: eigen_options(),
        mfs: Some(cfg),
    }
    .finish())
}

/// Parses `polygon:<n>`, `triangle`, `square`, `tetrahedron`, `octahedron`, `cube`.
pub fn parse_rotor(s: &str) -> Result<RotorKind, CatalogError> {
    let bad = || CatalogError::InvalidParams(format!("unknown rotor container `{s}`"));
    Ok(match s {
        "triangle" => RotorKind::Polygon(3),
        "square" => RotorKind::Polygon(4),
        "tetrahedron" => RotorKind::Tetrahedron,
        "octahedron" => RotorKind::Octahedron,
        "cube" => RotorKind::Cube,
        _ => {
            let n: usize = s.strip_prefix("polygon:").and_then(|n| n.parse().ok()).ok_or_else(bad)?;
            if n < 3 {
                return Err(bad());
            }
            RotorKind::Polygon(n)
        }
    })
}

fn rotor_name(kind: RotorKind) -> String {
    match kind {
        RotorKind::Polygon(n) => format!("polygon:{n}"),
        RotorKind::Tetrahedron => "tetrahedron".into(),
        RotorKind::Octahedron => "octahedron".into(),
        RotorKind::Cube => "cube".into(),
    }
}

fn rotor_min(params: &Params) -> Result<Problem, CatalogError> {
    let name = "rotor_min";
    params.accept_only(name, &["rotor", "inradius", "degree", "grid", "degrees"])?;
    let kind = parse_rotor(params.rotor.as_deref().unwrap_or("tetrahedron"))?;
    let r = positive("inradius", params.inradius.unwrap_or(0.5))?;
    let dim = kind.dim();
    let default_degree = match kind {
        RotorKind::Polygon(n) => (6 * n).max(30),
        RotorKind::Tetrahedron | RotorKind::Octahedron => 5,
        RotorKind::Cube => 9,
    };
    let degree = params.degree.unwrap_or(default_degree);
    let mut pattern = rotor_pattern(kind, degree, r).map_err(|e| CatalogError::InvalidParams(e.to_string()))?;
    let space = if dim == 2 { Space::Planar { order: degree } } else { Space::Spherical { degree } };
    if let Some(allowed) = &params.degrees {
        pattern = pattern.fix_unless(|i| allowed.contains(&space.degree_of(i)));
    }
    let mut degrees: Vec<usize> = pattern.free.iter().map(|&i| space.degree_of(i)).collect();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.is_empty() {
        return Err(CatalogError::InvalidParams("rotor pattern leaves no free coefficient".into()));
    }
    let (objective, m, linear, nonlinear): (Arc<dyn Objective>, _, _, _) = if dim == 2 {
        let m = at_least("grid", params.grid.unwrap_or(8 * degree), 2 * degree)?;
        (planar_objective(area_2d), m, Some(convexity_2d(degree, m)?), None)
    } else {
        let m = at_least("grid", params.grid.unwrap_or(default_grid_3d(degree)), 12)?;
        let volume = VolumeFunctional::new(degree, &SphereGrid::quadrature_for_degree(3 * degree)?);
        let objective = Arc::new(FnObjective::new(move |x: &[f64], h| Ok(volume.evaluate_unchecked(x, h)?)));
        (objective as Arc<dyn Objective>, m, None, Some(convexity_rows_3d(degree, m)?))
    };
    let key = match (kind, degrees.as_slice()) {
        (RotorKind::Tetrahedron, [2, 5]) => Some("rotor_tetra"),
        (RotorKind::Tetrahedron, [2]) => Some("rotor_tetra_deg2"),
        (RotorKind::Octahedron, [5]) => Some("rotor_octa"),
        _ => None,
    };
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim,
            degree,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::Rotor { rotor: rotor_name(kind), inradius: r, degrees },
            reference: key.and_then(reference).map(|x| x.rescaled((r / 0.5).powi(3))),
        },
        space,
        objective,
        base: ball_start(space, &pattern, r),
        pattern,
        linear,
        nonlinear,
        amplitude: 0.2,
        scale: 2.0 * r,
        starts: 4,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

fn j_gamma(params: &Params) -> Result<Problem, CatalogError> {
    let name = "j_gamma";
    params.accept_only(name, &["gamma", "width", "degree", "grid", "width_grid"])?;
    let gamma = positive("gamma", params.gamma.unwrap_or(0.4))?;
    let w = positive("width", params.width.unwrap_or(1.0))?;
    let order = at_least("degree", params.degree.unwrap_or(100), 3)?;
    let m = at_least("grid", params.grid.unwrap_or(1000), 2 * order)?;
    let mw = at_least("width_grid", params.width_grid.unwrap_or(m / 2), 2)?;
    let space = Space::Planar { order };
    let pattern = CoefficientPattern::all_free(space.coeff_len()).pin_translations(space);
    // p(θ) + p(θ + π) covers both antipodes, so θ ∈ [0, π) suffices
    let dirs: Vec<Direction> = (0..mw).map(|j| Direction::Angle(PI * j as f64 / mw as f64)).collect();
    let width = diameter_bounds(space, &dirs, &vec![f64::NEG_INFINITY; mw], &vec![w; mw])?;
    let linear = LinearConstraints::stack(&[&convexity_2d(order, m)?, &width])?;
    let objective = planar_objective(move |p| area_2d(p).scaled(gamma).add_scaled(-1.0, &perimeter_2d(p)));
    // the Reuleaux triangle is optimal below γ = 1/2
    let reference = reference("j_gamma_reuleaux")
        .filter(|_| gamma <= 0.5)
        .map(|r| Reference { value: gamma * reuleaux_area(w) - PI * w, ..r });
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim: 2,
            degree: order,
            grid: m,
            width_grid: Some(mw),
            objective: ObjectiveSpec::JGamma { gamma, width: w },
            reference,
        },
        space,
        objective,
        base: ball_start(space, &pattern, 0.45 * w),
        pattern,
        linear: Some(linear),
        nonlinear: None,
        amplitude: 0.1,
        scale: w,
        starts: 1,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

/// `count` directions, one per antipodal pair, from the upper half of a
/// Fibonacci lattice of `2 count` points.
fn antipodal_directions(count: usize) -> Result<Vec<Direction>, CatalogError> {
    let g = make_sphere_grid(2 * count, 0.0)?;
    Ok(g.points.iter().take(count).map(|p| Direction::Unit(p.n)).collect())
}

fn min_area_width_3d(params: &Params) -> Result<Problem, CatalogError> {
    let name = "min_area_width_3d";
    params.accept_only(name, &["width", "degree", "grid", "width_grid"])?;
    let w = positive("width", params.width.unwrap_or(1.0))?;
    let degree = at_least("degree", params.degree.unwrap_or(10), 2)?;
    let m = at_least("grid", params.grid.unwrap_or(2000), 12)?;
    let mw = at_least("width_grid", params.width_grid.unwrap_or(1000), 6)?;
    let space = Space::Spherical { degree };
    let pattern = CoefficientPattern::all_free(space.coeff_len()).pin_translations(space);
    let dirs = antipodal_directions(mw)?;
    let linear = diameter_bounds(space, &dirs, &vec![w; mw], &vec![f64::INFINITY; mw])?;
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim: 3,
            degree,
            grid: m,
            width_grid: Some(mw),
            objective: ObjectiveSpec::WidthBoundedArea { width: w },
            reference: reference(name).map(|r| r.rescaled(w * w)),
        },
        space,
        objective: spatial_objective(area_3d),
        base: ball_start(space, &pattern, 0.55 * w),
        pattern,
        linear: Some(linear),
        nonlinear: Some(convexity_rows_3d(degree, m)?),
        amplitude: 0.1,
        scale: w,
        starts: 3,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

/// Container polytope by name: `square` (side `2r`), `triangle`,
/// `tetrahedron`, `cube`, `octahedron`, `dodecahedron`, all of inradius `r`.
pub fn container(name: &str, r: f64) -> Result<Polytope, CatalogError> {
    Ok(match name {
        "square" => Polytope::regular_polygon(4, r),
        "triangle" => Polytope::regular_polygon(3, r),
        "tetrahedron" => Polytope::tetrahedron(r),
        "cube" => Polytope::cube(r),
        "octahedron" => Polytope::octahedron(r),
        "dodecahedron" => Polytope::dodecahedron(r),
        _ => return Err(CatalogError::InvalidParams(format!("unknown container `{name}`"))),
    })
}

fn cheeger(params: &Params, dim: usize) -> Result<Problem, CatalogError> {
    let name = if dim == 2 { "cheeger_2d" } else { "cheeger" };
    let allowed: &[&str] = if dim == 2 { &["container", "inradius", "degree", "grid"] } else { &["container", "inradius", "degree", "grid", "dim"] };
    params.accept_only(name, allowed)?;
    let default_container = if dim == 2 { "square" } else { "cube" };
    let cname = params.container.clone().unwrap_or_else(|| default_container.into());
    let r = positive("inradius", params.inradius.unwrap_or(0.5))?;
    let poly = container(&cname, r)?;
    if poly.dim() != dim {
        return Err(CatalogError::InvalidParams(format!("container `{cname}` is not {dim}-dimensional")));
    }
    let (space, degree, m, objective, linear_convexity, nonlinear): (_, _, _, Arc<dyn Objective>, _, _) = if dim == 2 {
        let order = at_least("degree", params.degree.unwrap_or(100), 2)?;
        let m = at_least("grid", params.grid.unwrap_or(8 * order), 2 * order)?;
        let objective = planar_objective(|p| GradedValue::quotient(&perimeter_2d(p), &area_2d(p)));
        (Space::Planar { order }, order, m, objective, Some(convexity_2d(order, m)?), None)
    } else if dim == 3 {
        let degree = at_least("degree", params.degree.unwrap_or(10), 2)?;
        let m = at_least("grid", params.grid.unwrap_or(default_grid_3d(degree)), 12)?;
        let volume = VolumeFunctional::new(degree, &SphereGrid::quadrature_for_degree(3 * degree)?);
        let objective = Arc::new(FnObjective::new(move |x: &[f64], h| {
            let a = area_3d(&SphericalSupport3D::from_coeffs(x)?);
            let v = volume.evaluate_unchecked(x, h)?;
            if !(v.value > 0.0) {
                return Err(supportshape_nlp::EvalError(format!("non-positive volume {}", v.value)));
            }
            Ok(GradedValue::quotient(&a, &v))
        }));
        (Space::Spherical { degree }, degree, m, objective as Arc<dyn Objective>, None, Some(convexity_rows_3d(degree, m)?))
    } else {
        return Err(CatalogError::InvalidParams(format!("dim must be 2 or 3, got {dim}")));
    };
    let inclusion = inclusion_constraints(space, &Container::Polytope(poly), None)?;
    let linear = match linear_convexity {
        Some(c) => LinearConstraints::stack(&[&c, &inclusion])?,
        None => inclusion,
    };
    let pattern = CoefficientPattern::all_free(space.coeff_len());
    // translations matter inside a container: keep them free
    let reference = (dim == 2 && cname == "square").then(|| reference("cheeger_square")).flatten().map(|x| x.rescaled(0.5 / r));
    Ok(Parts {
        spec: ProblemSpec {
            name,
            dim,
            degree,
            grid: m,
            width_grid: None,
            objective: ObjectiveSpec::Cheeger { container: cname, inradius: r },
            reference,
        },
        space,
        objective,
        base: ball_start(space, &pattern, 0.8 * r),
        pattern,
        linear: Some(linear),
        nonlinear,
        amplitude: 0.1,
        scale: 2.0 * r,
        starts: 1,
        options: SolveOptions::default(),
        mfs: None,
    }
    .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rotation_moves_the_width_maximum_to_zero() {
        let p = FourierSupport2D::new(1.0, vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.05]).unwrap().rotated(0.7);
        let c = canonical_rotation_2d(&p.to_coeffs()).unwrap();
        let q = FourierSupport2D::from_coeffs(&c).unwrap();
        let w = |t: f64| q.eval(t, 0) + q.eval(t + PI, 0);
        assert!((0..500).all(|i| w(PI * i as f64 / 500.0) <= w(0.0) + 1e-9));
    }

    #[test]
    fn rotor_names_round_trip() {
        for s in ["polygon:5", "tetrahedron", "octahedron", "cube"] {
            assert_eq!(rotor_name(parse_rotor(s).unwrap()), s);
        }
        assert!(parse_rotor("polygon:2").is_err());
        assert!(parse_rotor("sphere").is_err());
    }
}
