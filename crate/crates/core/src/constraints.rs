//! Discrete constraint systems in coefficient space.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Result, ShapeError};
use crate::fourier;
use crate::harmonics::HarmonicGrid;
use crate::polytope::Polytope;
use crate::space::{Direction, Space};
use crate::sphere::SphereGrid;

/// Two-sided linear rows `lower <= A x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraints {
    pub matrix: Array2<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearConstraints {
    pub fn new(matrix: Array2<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let rows = matrix.nrows();
        if lower.len() != rows || upper.len() != rows {
            return Err(ShapeError::InvalidArgument(format!(
                "{rows} rows but {} lower / {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..rows).find(|&i| lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i]) {
            return Err(ShapeError::InvalidArgument(format!(
                "row {i}: lower {} exceeds upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { matrix, lower, upper })
    }

    pub fn empty(coeff_len: usize) -> Self {
        Self { matrix: Array2::zeros((0, coeff_len)), lower: vec![], upper: vec![] }
    }

    /// One-sided rows `A x >= lower`.
    pub fn at_least(matrix: Array2<f64>, lower: Vec<f64>) -> Result<Self> {
        let upper = vec![f64::INFINITY; lower.len()];
        Self::new(matrix, lower, upper)
    }

    /// One-sided rows `A x <= upper`.
    pub fn at_most(matrix: Array2<f64>, upper: Vec<f64>) -> Result<Self> {
        let lower = vec![f64::NEG_INFINITY; upper.len()];
        Self::new(matrix, lower, upper)
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn coeff_len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0
    }

    pub fn values(&self, coeffs: &[f64]) -> Vec<f64> {
        self.matrix.dot(&ArrayView1::from(coeffs)).to_vec()
    }

    /// Per-row distance outside `[lower, upper]` (0 when satisfied).
    pub fn violations(&self, coeffs: &[f64]) -> Vec<f64> {
        self.values(coeffs)
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (lo - v).max(v - hi).max(0.0))
            .collect()
    }

    pub fn max_violation(&self, coeffs: &[f64]) -> f64 {
        self.violations(coeffs).into_iter().fold(0.0, f64::max)
    }

    pub fn stack(parts: &[&LinearConstraints]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(ShapeError::InvalidArgument("nothing to stack".into()));
        };
        let n = first.coeff_len();
        if parts.iter().any(|p| p.coeff_len() != n) {
            return Err(ShapeError::InvalidArgument("stacked constraints disagree on coefficient count".into()));
        }
        let views: Vec<_> = parts.iter().map(|p| p.matrix.view()).collect();
        let matrix = ndarray::concatenate(Axis(0), &views)
            .map_err(|e| ShapeError::InvalidArgument(e.to_string()))?;
        let lower = parts.iter().flat_map(|p| p.lower.iter().copied()).collect();
        let upper = parts.iter().flat_map(|p| p.upper.iter().copied()).collect();
        Self::new(matrix, lower, upper)
    }

    /// Columns of the free coefficients, with fixed contributions moved into
    /// the bounds. Rows left without any free column are dropped; the second
    /// value lists the original index of every kept row.
    pub fn reduce(&self, pattern: &CoefficientPattern) -> Result<(LinearConstraints, Vec<usize>)> {
        pattern.check_len(self.coeff_len())?;
        let fixed_full = pattern.expand(&vec![0.0; pattern.free.len()])?;
        let shift = self.matrix.dot(&Array1::from(fixed_full));
        let mut keep = Vec::new();
        for i in 0..self.rows() {
            let row = self.matrix.row(i);
            if pattern.free.iter().any(|&j| row[j] != 0.0) {
                keep.push(i);
            }
        }
        let mut matrix = Array2::zeros((keep.len(), pattern.free.len()));
        let (mut lower, mut upper) = (Vec::with_capacity(keep.len()), Vec::with_capacity(keep.len()));
        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in pattern.free.iter().enumerate() {
                matrix[[r, c]] = self.matrix[[i, j]];
            }
            lower.push(self.lower[i] - shift[i]);
            upper.push(self.upper[i] - shift[i]);
        }
        Ok((Self::new(matrix, lower, upper)?, keep))
    }
}

/// Residuals `g(x) >= 0` that are nonlinear in the coefficients.
pub trait NonlinearConstraints: Send + Sync {
    fn len(&self) -> usize;
    fn coeff_len(&self) -> usize;
    fn residual(&self, coeffs: &[f64]) -> Vec<f64>;
    /// Row `i` is `∇g_i`.
    fn jacobian(&self, coeffs: &[f64]) -> Array2<f64>;
    /// `Σ_i weights_i ∇²g_i`.
    fn weighted_hessian(&self, coeffs: &[f64], weights: &[f64]) -> Array2<f64>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pointwise positivity of the surface Jacobian (positive Gaussian curvature)
/// on a sphere grid.
#[derive(Debug, Clone)]
pub struct ConvexityConstraints3D {
    tables: HarmonicGrid,
}

impl ConvexityConstraints3D {
    pub fn tables(&self) -> &HarmonicGrid {
        &self.tables
    }
}

impl NonlinearConstraints for ConvexityConstraints3D {
    fn len(&self) -> usize {
        self.tables.len()
    }

    fn coeff_len(&self) -> usize {
        self.tables.coeff_len()
    }

    fn residual(&self, coeffs: &[f64]) -> Vec<f64> {
        self.tables.jacobians(coeffs)
    }

    fn jacobian(&self, coeffs: &[f64]) -> Array2<f64> {
        self.tables.jacobian_gradients(coeffs)
    }

    fn weighted_hessian(&self, _coeffs: &[f64], weights: &[f64]) -> Array2<f64> {
        self.tables.weighted_jacobian_hessian(weights)
    }
}

pub fn convexity_3d(degree: usize, grid: &SphereGrid) -> Result<ConvexityConstraints3D> {
    if let Some(p) = grid.points.iter().find(|p| p.psi < grid.pole_margin || p.psi > PI - grid.pole_margin) {
        return Err(ShapeError::PoleEvaluation { psi: p.psi, margin: grid.pole_margin });
    }
    Ok(ConvexityConstraints3D { tables: HarmonicGrid::new(degree, grid) })
}

/// Default 3D convexity sample count, `2 (N + 1)²`.
pub fn default_convexity_points(degree: usize) -> usize {
    2 * (degree + 1) * (degree + 1)
}

/// `p + p'' >= 0` at `θ_m = 2π m / M`, `m = 1..M`.
pub fn convexity_2d(order: usize, samples: usize) -> Result<LinearConstraints> {
    if samples < 2 * order || samples == 0 {
        return Err(ShapeError::InvalidArgument(format!(
            "convexity sampling needs M >= 2N = {}, got {samples}",
            2 * order
        )));
    }
    let thetas: Vec<f64> = (1..=samples).map(|m| 2.0 * PI * m as f64 / samples as f64).collect();
    convexity_2d_at(order, &thetas)
}

/// Convexity rows at arbitrary angles, without the density check.
pub fn convexity_2d_at(order: usize, thetas: &[f64]) -> Result<LinearConstraints> {
    let n = fourier::coeff_len(order);
    let mut matrix = Array2::zeros((thetas.len(), n));
    for (i, &t) in thetas.iter().enumerate() {
        matrix.row_mut(i).assign(&Array1::from(fourier::curvature_row(order, t)));
    }
    LinearConstraints::at_least(matrix, vec![0.0; thetas.len()])
}

/// Fixed coefficients (index → value) and the complementary free indices,
/// both in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPattern {
    len: usize,
    pub fixed: BTreeMap<usize, f64>,
    pub free: Vec<usize>,
}

impl CoefficientPattern {
    pub fn all_free(len: usize) -> Self {
        Self { len, fixed: BTreeMap::new(), free: (0..len).collect() }
    }

    pub fn new(len: usize, fixed: BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((&i, _)) = fixed.iter().find(|(&i, v)| i >= len || !v.is_finite()) {
            return Err(ShapeError::InvalidArgument(format!("bad fixed entry at index {i} (len {len})")));
        }
        let free = (0..len).filter(|i| !fixed.contains_key(i)).collect();
        Ok(Self { len, fixed, free })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn free_len(&self) -> usize {
        self.free.len()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len {
            return Err(ShapeError::InvalidArgument(format!(
                "pattern covers {} coefficients, got {n}",
                self.len
            )));
        }
        Ok(())
    }

    /// Sets `idx` to `value`, removing it from the free set.
    pub fn fix(mut self, idx: usize, value: f64) -> Self {
        assert!(idx < self.len, "index {idx} out of range");
        self.fixed.insert(idx, value);
        self.free.retain(|&i| i != idx);
        self
    }

    /// Fixes to zero every free index rejected by `keep`.
    pub fn fix_unless(mut self, keep: impl Fn(usize) -> bool) -> Self {
        let (kept, dropped): (Vec<usize>, Vec<usize>) = self.free.iter().partition(|&&i| keep(i));
        for i in dropped {
            self.fixed.insert(i, 0.0);
        }
        self.free = kept;
        self
    }

    /// Fixes the translation modes (index/degree 1) to zero.
    pub fn pin_translations(self, space: Space) -> Self {
        self.fix_unless(|i| space.degree_of(i) != 1)
    }

    pub fn expand(&self, reduced: &[f64]) -> Result<Vec<f64>> {
        if reduced.len() != self.free.len() {
            return Err(ShapeError::InvalidArgument(format!(
                "{} free coefficients, got {}",
                self.free.len(),
                reduced.len()
            )));
        }
        let mut full = vec![0.0; self.len];
        for (&i, &v) in &self.fixed {
            full[i] = v;
        }
        for (&i, &v) in self.free.iter().zip(reduced) {
            full[i] = v;
        }
        Ok(full)
    }

    pub fn restrict(&self, full: &[f64]) -> Result<Vec<f64>> {
        self.check_len(full.len())?;
        Ok(self.free.iter().map(|&i| full[i]).collect())
    }

    /// Largest deviation of `full` from the fixed values.
    pub fn fixed_deviation(&self, full: &[f64]) -> f64 {
        self.fixed.iter().map(|(&i, &v)| (full[i] - v).abs()).fold(0.0, f64::max)
    }

    /// Reduced matrix `S` with `full = S · reduced + fixed`.
    pub fn selection(&self) -> Array2<f64> {
        let mut s = Array2::zeros((self.len, self.free.len()));
        for (c, &i) in self.free.iter().enumerate() {
            s[[i, c]] = 1.0;
        }
        s
    }
}

/// Constant width `w`: constant term `w/2` (planar) or `(w/2)√(4π)` (spatial),
/// every even non-constant index/degree fixed to zero.
pub fn constant_width_pattern(space: Space, w: f64) -> CoefficientPattern {
    let fixed = (1..space.coeff_len())
        .filter(|&i| space.degree_of(i).is_multiple_of(2))
        .map(|i| (i, 0.0))
        .chain(std::iter::once((0, space.constant_for_radius(w / 2.0))))
        .collect();
    CoefficientPattern::new(space.coeff_len(), fixed).expect("indices in range")
}

/// Rows `lo_j <= p(u_j) + p(-u_j) <= hi_j`.
pub fn diameter_bounds(space: Space, directions: &[Direction], lo: &[f64], hi: &[f64]) -> Result<LinearConstraints> {
    if lo.len() != directions.len() || hi.len() != directions.len() {
        return Err(ShapeError::InvalidArgument("one lower/upper bound per direction required".into()));
    }
    let mut matrix = Array2::zeros((directions.len(), space.coeff_len()));
    for (i, d) in directions.iter().enumerate() {
        let plus = space.basis_at(*d);
        let minus = space.basis_at(d.opposite());
        for (j, (a, b)) in plus.iter().zip(&minus).enumerate() {
            // odd basis functions cancel exactly
            matrix[[i, j]] = if space.degree_of(j) % 2 == 1 { 0.0 } else { a + b };
        }
    }
    LinearConstraints::new(matrix, lo.to_vec(), hi.to_vec())
}

pub type SupportSampler = Arc<dyn Fn(Direction) -> f64 + Send + Sync>;

/// Region a body has to stay inside.
#[derive(Clone)]
pub enum Container {
    Polytope(Polytope),
    /// Convex container known through its support function.
    Support(SupportSampler),
}

impl std::fmt::Debug for Container {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Container::Polytope(p) => f.debug_tuple("Polytope").field(p).finish(),
            Container::Support(_) => f.write_str("Support(..)"),
        }
    }
}

/// Rows `p(u_j) <= h(u_j)`. Polytopes use their face normals, which suffices
/// by convexity; a support sampler needs an explicit dense direction list.
pub fn inclusion_constraints(
    space: Space,
    container: &Container,
    directions: Option<&[Direction]>,
) -> Result<LinearConstraints> {
    let (dirs, offsets): (Vec<Direction>, Vec<f64>) = match (container, directions) {
        (Container::Polytope(p), None) => (p.normals.clone(), p.offsets.clone()),
        (Container::Polytope(_), Some(_)) => {
            return Err(ShapeError::InvalidArgument(
                "polytope containers are sampled at their face normals".into(),
            ))
        }
        (Container::Support(h), Some(d)) => (d.to_vec(), d.iter().map(|&u| h(u)).collect()),
        (Container::Support(_), None) => {
            return Err(ShapeError::InvalidArgument("support-function container needs directions".into()))
        }
    };
    let mut matrix = Array2::zeros((dirs.len(), space.coeff_len()));
    for (i, d) in dirs.iter().enumerate() {
        matrix.row_mut(i).assign(&Array1::from(space.basis_at(*d)));
    }
    LinearConstraints::at_most(matrix, offsets)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotorKind {
    Polygon(usize),
    Tetrahedron,
    Octahedron,
    Cube,
}

impl RotorKind {
    pub fn dim(&self) -> usize {
        match self {
            RotorKind::Polygon(_) => 2,
            _ => 3,
        }
    }

    pub fn container(&self, inradius: f64) -> Polytope {
        match *self {
            RotorKind::Polygon(n) => Polytope::regular_polygon(n, inradius),
            RotorKind::Tetrahedron => Polytope::tetrahedron(inradius),
            RotorKind::Octahedron => Polytope::octahedron(inradius),
            RotorKind::Cube => Polytope::cube(inradius),
        }
    }

    /// Whether a non-constant index/degree `k >= 2` may be non-zero in a rotor.
    ///
    /// A body rotates inside the container touching every face iff, for every
    /// rotation, its support values at the face normals are those of a
    /// translate of the container; per degree this is a linear condition on
    /// harmonics restricted to the normals.
    pub fn allows(&self, k: usize) -> bool {
        match *self {
            RotorKind::Polygon(n) => k >= 2 && (k % n == 1 || k % n == n - 1),
            RotorKind::Tetrahedron => k == 2 || k == 5,
            RotorKind::Octahedron => k == 5,
            RotorKind::Cube => k % 2 == 1 && k >= 3,
        }
    }

    fn min_truncation(&self) -> usize {
        match *self {
            RotorKind::Polygon(n) => n.saturating_sub(1).max(2),
            RotorKind::Tetrahedron | RotorKind::Octahedron => 5,
            RotorKind::Cube => 3,
        }
    }
}

/// Rotor sparsity: constant term from the inradius, translations pinned,
/// only admissible indices free.
pub fn rotor_pattern(kind: RotorKind, truncation: usize, inradius: f64) -> Result<CoefficientPattern> {
    if truncation < kind.min_truncation() {
        return Err(ShapeError::InvalidArgument(format!(
            "{kind:?} rotors need truncation >= {}, got {truncation}",
            kind.min_truncation()
        )));
    }
    let space = match kind {
        RotorKind::Polygon(n) if n < 3 => {
            return Err(ShapeError::InvalidArgument(format!("polygon rotor needs n >= 3, got {n}")))
        }
        RotorKind::Polygon(_) => Space::Planar { order: truncation },
        _ => Space::Spherical { degree: truncation },
    };
    let pattern = CoefficientPattern::all_free(space.coeff_len())
        .fix(0, space.constant_for_radius(inradius))
        .fix_unless(|i| kind.allows(space.degree_of(i)));
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierSupport2D;
    use crate::harmonics::SphericalSupport3D;
    use crate::sphere::{make_sphere_grid, DEFAULT_POLE_MARGIN};

    #[test]
    fn convexity_row_example() {
        let c = convexity_2d_at(2, &[2.0 * PI]).unwrap();
        let row = c.matrix.row(0).to_vec();
        let want = [1.0, 0.0, -3.0, 0.0, 0.0];
        for (a, b) in row.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(convexity_2d(5, 9).is_err());
    }

    #[test]
    fn convexity_2d_flags_nonconvex() {
        let c = convexity_2d(2, 16).unwrap();
        let disk = FourierSupport2D::disk(1.0, 2).to_coeffs();
        assert!(c.values(&disk).iter().all(|v| (v - 1.0).abs() < 1e-14));
        let mut p = FourierSupport2D::disk(1.0, 2);
        p.a[1] = 0.4;
        let vals = c.values(&p.to_coeffs());
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - (-0.2)).abs() < 1e-12);
        assert!(c.max_violation(&p.to_coeffs()) > 0.19);
    }

    #[test]
    fn convexity_3d_sphere_and_translation() {
        let grid = make_sphere_grid(200, DEFAULT_POLE_MARGIN).unwrap();
        let con = convexity_3d(3, &grid).unwrap();
        let ball = SphericalSupport3D::ball(0.8, 3);
        let r = con.residual(ball.coeffs());
        for (v, p) in r.iter().zip(&grid.points) {
            assert!((v - 0.64 * p.psi.sin()).abs() < 1e-13);
        }
        let mut shifted = ball.clone();
        shifted.set(1, -1, 0.3);
        shifted.set(1, 1, -0.2);
        for (a, b) in con.residual(shifted.coeffs()).iter().zip(&r) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_width_examples() {
        let p3 = constant_width_pattern(Space::Spherical { degree: 4 }, 1.0);
        assert!((p3.fixed[&0] - PI.sqrt()).abs() < 1e-15);
        assert!(p3.free.iter().all(|&i| crate::harmonics::sph_lm(i).0 % 2 == 1));
        let p2 = constant_width_pattern(Space::Planar { order: 5 }, 2.0);
        assert_eq!(p2.fixed[&0], 1.0);
        let full = p2.expand(&vec![0.0; p2.free_len()]).unwrap();
        assert_eq!(full, FourierSupport2D::disk(1.0, 5).to_coeffs());
    }

    #[test]
    fn pattern_round_trip_and_reduce() {
        let pat = CoefficientPattern::all_free(5).fix(0, 2.0).fix(3, -1.0);
        assert_eq!(pat.free, vec![1, 2, 4]);
        let full = pat.expand(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(full, vec![2.0, 0.1, 0.2, -1.0, 0.3]);
        assert_eq!(pat.restrict(&full).unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(pat.fixed_deviation(&full), 0.0);

        let m = Array2::from_shape_vec((2, 5), vec![1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 2.0, 0.0]).unwrap();
        let lc = LinearConstraints::at_least(m, vec![0.0, 0.0]).unwrap();
        let (red, kept) = lc.reduce(&pat).unwrap();
        assert_eq!(kept, vec![0]);
        assert_eq!(red.rows(), 1);
        assert_eq!(red.lower, vec![-1.0]);
        assert_eq!(red.matrix.row(0).to_vec(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn diameter_rows() {
        let space = Space::Planar { order: 5 };
        let dirs: Vec<_> = (0..7).map(|i| Direction::Angle(0.3 * i as f64)).collect();
        let d = diameter_bounds(space, &dirs, &[1.0; 7], &[f64::INFINITY; 7]).unwrap();
        let half = FourierSupport2D::disk(0.5, 5).to_coeffs();
        assert!(d.values(&half).iter().all(|v| (v - 1.0).abs() < 1e-15));
        for i in 0..7 {
            for k in [1, 3, 5] {
                assert_eq!(d.matrix[[i, fourier::cos_index(k)]], 0.0);
                assert_eq!(d.matrix[[i, fourier::sin_index(5, k)]], 0.0);
            }
        }
    }

    #[test]
    fn inclusion_examples() {
        let sq = Container::Polytope(Polytope::square(1.0));
        let space = Space::Planar { order: 3 };
        let c = inclusion_constraints(space, &sq, None).unwrap();
        let fits = FourierSupport2D::disk(0.5, 3).to_coeffs();
        assert_eq!(c.max_violation(&fits), 0.0);
        assert!(c.values(&fits).iter().all(|v| (v - 0.5).abs() < 1e-15));
        let big = FourierSupport2D::disk(0.6, 3).to_coeffs();
        assert_eq!(c.violations(&big).iter().filter(|v| **v > 0.0).count(), 4);

        let cube = Container::Polytope(Polytope::cube(0.5));
        let s3 = Space::Spherical { degree: 2 };
        let c3 = inclusion_constraints(s3, &cube, None).unwrap();
        let ball = SphericalSupport3D::ball(0.5, 2);
        let active = c3.values(ball.coeffs()).iter().filter(|v| (*v - 0.5).abs() < 1e-12).count();
        assert_eq!(active, 6);
        assert!(inclusion_constraints(s3, &cube, Some(&[])).is_err());
    }

    #[test]
    fn rotor_examples() {
        let tri = rotor_pattern(RotorKind::Polygon(3), 8, 0.5).unwrap();
        let freqs: std::collections::BTreeSet<usize> =
            tri.free.iter().map(|&i| fourier::frequency_of(8, i)).collect();
        assert_eq!(freqs.into_iter().collect::<Vec<_>>(), vec![2, 4, 5, 7, 8]);
        assert_eq!(tri.fixed[&0], 0.5);

        let tet = rotor_pattern(RotorKind::Tetrahedron, 6, 1.0).unwrap();
        let degs: std::collections::BTreeSet<usize> =
            tet.free.iter().map(|&i| crate::harmonics::sph_lm(i).0).collect();
        assert_eq!(degs.into_iter().collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(tet.free.len(), 5 + 11);
        assert!(rotor_pattern(RotorKind::Octahedron, 4, 1.0).is_err());

        let space = Space::Spherical { degree: 7 };
        let cube = rotor_pattern(RotorKind::Cube, 7, 0.5).unwrap();
        assert_eq!(cube, constant_width_pattern(space, 1.0).pin_translations(space));
    }
}
