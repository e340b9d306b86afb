//! Reduction to free coefficients, one-sided row form and scaling.

use ndarray::{Array1, Array2};

use crate::ipm::{Model, ObjEval};
use crate::problem::{EvalError, NlpProblem};
use crate::SolveError;

/// Which user row an internal one-sided row came from.
#[derive(Debug, Clone, Copy)]
pub(crate) enum RowSource {
    Lower(usize),
    Upper(usize),
    Nonlinear(usize),
}

pub(crate) struct Scaled<'a> {
    pub problem: &'a NlpProblem,
    pub obj_scale: f64,
    /// internal linear rows `s_i (a_i·x - b_i) >= 0`, already scaled
    lin_a: Array2<f64>,
    lin_b: Array1<f64>,
    pub sources: Vec<RowSource>,
    /// scale of every internal row (linear first, then nonlinear)
    pub row_scale: Vec<f64>,
    /// internal variables are `x_j / col_scale_j` on the free coefficients
    col_scale: Array1<f64>,
    use_hessian: bool,
}

impl<'a> Scaled<'a> {
    pub fn new(problem: &'a NlpProblem, force_bfgs: bool) -> Result<Self, SolveError> {
        let pattern = &problem.pattern;
        let (reduced, kept) = problem.linear.reduce(pattern).map_err(|e| SolveError::InvalidProblem(e.to_string()))?;
        let n = pattern.free_len();
        // column equilibration first, so that rows see comparable variables
        let col_scale = Array1::from_shape_fn(n, |j| {
            let norm = reduced.matrix.column(j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if norm > 0.0 { 1.0 / norm } else { 1.0 }
        });
        let mut rows: Vec<Array1<f64>> = Vec::new();
        let mut offsets = Vec::new();
        let mut sources = Vec::new();
        let mut row_scale = Vec::new();
        for (r, &orig) in kept.iter().enumerate() {
            let a = Array1::from_shape_fn(n, |j| reduced.matrix[[r, j]] * col_scale[j]);
            let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let s = 1.0 / norm;
            let (lo, hi) = (reduced.lower[r], reduced.upper[r]);
            if lo == hi {
                return Err(SolveError::InvalidProblem(format!("row {orig} is an equality; fix coefficients instead")));
            }
            if lo.is_finite() {
                rows.push(&a * s);
                offsets.push(lo * s);
                sources.push(RowSource::Lower(orig));
                row_scale.push(s);
            }
            if hi.is_finite() {
                rows.push(&a * -s);
                offsets.push(-hi * s);
                sources.push(RowSource::Upper(orig));
                row_scale.push(s);
            }
        }
        let mut lin_a = Array2::zeros((rows.len(), n));
        for (i, r) in rows.iter().enumerate() {
            lin_a.row_mut(i).assign(r);
        }

        let start = &problem.start;
        if let Some(g) = &problem.nonlinear {
            let jac = g.jacobian(start);
            for i in 0..g.len() {
                let norm = pattern.free.iter().zip(&col_scale).fold(0.0f64, |m, (&j, s)| m.max((s * jac[[i, j]]).abs()));
                row_scale.push(if norm > 1e-12 { 1.0 / norm } else { 1.0 });
                sources.push(RowSource::Nonlinear(i));
            }
        }

        let grad = problem
            .objective
            .evaluate(start, false)
            .map_err(|e| SolveError::Evaluation(format!("objective at start: {e}")))?
            .gradient;
        let gmax = pattern.free.iter().zip(&col_scale).fold(0.0f64, |m, (&j, s)| m.max((s * grad[j]).abs()));
        let obj_scale = if gmax > 100.0 { 100.0 / gmax } else { 1.0 };
        let use_hessian = problem.objective.has_hessian() && !force_bfgs;
        Ok(Self { problem, obj_scale, lin_a, lin_b: Array1::from(offsets), sources, row_scale, col_scale, use_hessian })
    }

    /// Full coefficient vector of an internal point.
    pub fn full(&self, y: &[f64]) -> Vec<f64> {
        let x: Vec<f64> = y.iter().zip(&self.col_scale).map(|(v, s)| v * s).collect();
        self.problem.pattern.expand(&x).expect("reduced length")
    }

    /// Internal point of a full coefficient vector.
    pub fn internal(&self, full: &[f64]) -> Vec<f64> {
        let x = self.problem.pattern.restrict(full).expect("full length");
        x.iter().zip(&self.col_scale).map(|(v, s)| v / s).collect()
    }

    pub fn linear_rows(&self) -> usize {
        self.lin_a.nrows()
    }

    /// Rows that lost every free column must already hold at the fixed values.
    pub fn fixed_row_violation(&self) -> f64 {
        let full = self.full(&vec![0.0; self.problem.pattern.free_len()]);
        let lin = &self.problem.linear;
        let (_, kept) = lin.reduce(&self.problem.pattern).expect("validated");
        let vals = lin.violations(&full);
        (0..lin.rows()).filter(|i| !kept.contains(i)).map(|i| vals[i]).fold(0.0, f64::max)
    }

    /// Per user row multipliers from internal scaled ones.
    pub fn user_multipliers(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut lin = vec![0.0; self.problem.linear.rows()];
        let mut nl = vec![0.0; self.problem.nonlinear.as_ref().map_or(0, |g| g.len())];
        for (k, src) in self.sources.iter().enumerate() {
            let v = z[k] * self.row_scale[k] / self.obj_scale;
            match *src {
                RowSource::Lower(i) => lin[i] += v,
                RowSource::Upper(i) => lin[i] -= v,
                RowSource::Nonlinear(i) => nl[i] = v,
            }
        }
        (lin, nl)
    }
}

impl Model for Scaled<'_> {
    fn dim(&self) -> usize {
        self.problem.pattern.free_len()
    }

    fn rows(&self) -> usize {
        self.sources.len()
    }

    fn has_hessian(&self) -> bool {
        self.use_hessian
    }

    fn objective(&self, x: &[f64], want_hessian: bool) -> Result<ObjEval, EvalError> {
        let full = self.full(x);
        let g = self.problem.objective.evaluate(&full, want_hessian && self.use_hessian)?;
        if !g.value.is_finite() || g.gradient.iter().any(|v| !v.is_finite()) {
            return Err(EvalError("objective is not finite".into()));
        }
        let free = &self.problem.pattern.free;
        let (s, d) = (self.obj_scale, &self.col_scale);
        let gradient = free.iter().zip(d).map(|(&j, dj)| s * dj * g.gradient[j]).collect();
        let hessian = g.hessian.map(|h| {
            let n = free.len();
            Array2::from_shape_fn((n, n), |(a, b)| s * d[a] * d[b] * h[[free[a], free[b]]])
        });
        Ok(ObjEval { value: s * g.value, gradient, hessian })
    }

    fn constraints(&self, x: &[f64]) -> Array1<f64> {
        let lin = self.lin_a.dot(&ndarray::ArrayView1::from(x)) - &self.lin_b;
        match &self.problem.nonlinear {
            None => lin,
            Some(g) => {
                let off = self.linear_rows();
                let r = g.residual(&self.full(x));
                let mut out = Array1::zeros(self.rows());
                out.slice_mut(ndarray::s![..off]).assign(&lin);
                for (i, v) in r.iter().enumerate() {
                    out[off + i] = self.row_scale[off + i] * v;
                }
                out
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> Array2<f64> {
        match &self.problem.nonlinear {
            None => self.lin_a.clone(),
            Some(g) => {
                let off = self.linear_rows();
                let free = &self.problem.pattern.free;
                let jf = g.jacobian(&self.full(x));
                let mut out = Array2::zeros((self.rows(), free.len()));
                out.slice_mut(ndarray::s![..off, ..]).assign(&self.lin_a);
                for i in 0..g.len() {
                    let s = self.row_scale[off + i];
                    for (c, &j) in free.iter().enumerate() {
                        out[[off + i, c]] = s * self.col_scale[c] * jf[[i, j]];
                    }
                }
                out
            }
        }
    }

    fn constraint_hessian(&self, x: &[f64], z: &[f64]) -> Option<Array2<f64>> {
        let g = self.problem.nonlinear.as_ref()?;
        let off = self.linear_rows();
        let w: Vec<f64> = (0..g.len()).map(|i| z[off + i] * self.row_scale[off + i]).collect();
        let h = g.weighted_hessian(&self.full(x), &w);
        let free = &self.problem.pattern.free;
        let n = free.len();
        let d = &self.col_scale;
        Some(Array2::from_shape_fn((n, n), |(a, b)| d[a] * d[b] * h[[free[a], free[b]]]))
    }

    fn report_value(&self, scaled: f64) -> f64 {
        scaled / self.obj_scale
    }

    fn report_violation(&self, _x: &[f64], _c: &Array1<f64>) -> f64 {
        0.0
    }

    fn report_kkt(&self, dual: &Array1<f64>, comp: f64) -> f64 {
        let dual_inf = dual.iter().zip(&self.col_scale).fold(0.0f64, |m, (v, s)| m.max((v / s).abs()));
        dual_inf.max(comp) / self.obj_scale
    }
}

/// `min s + (ρ/2)|x - x0|²` subject to `c(x) + s >= 0`, started at a point
/// where `s` makes every row strictly positive.
pub(crate) struct Phase1<'a, M: Model> {
    pub inner: &'a M,
    pub anchor: Vec<f64>,
    pub rho: f64,
}

impl<M: Model> Model for Phase1<'_, M> {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }

    fn rows(&self) -> usize {
        self.inner.rows()
    }

    fn has_hessian(&self) -> bool {
        true
    }

    fn objective(&self, x: &[f64], _want_hessian: bool) -> Result<ObjEval, EvalError> {
        let n = self.inner.dim();
        let mut gradient = Array1::zeros(n + 1);
        let mut value = x[n];
        for i in 0..n {
            let d = x[i] - self.anchor[i];
            value += 0.5 * self.rho * d * d;
            gradient[i] = self.rho * d;
        }
        gradient[n] = 1.0;
        let mut hessian = Array2::zeros((n + 1, n + 1));
        for i in 0..n {
            hessian[[i, i]] = self.rho;
        }
        Ok(ObjEval { value, gradient, hessian: Some(hessian) })
    }

    fn constraints(&self, x: &[f64]) -> Array1<f64> {
        let n = self.inner.dim();
        self.inner.constraints(&x[..n]) + x[n]
    }

    fn jacobian(&self, x: &[f64]) -> Array2<f64> {
        let n = self.inner.dim();
        let j = self.inner.jacobian(&x[..n]);
        let mut out = Array2::ones((j.nrows(), n + 1));
        out.slice_mut(ndarray::s![.., ..n]).assign(&j);
        out
    }

    fn constraint_hessian(&self, x: &[f64], z: &[f64]) -> Option<Array2<f64>> {
        let n = self.inner.dim();
        let h = self.inner.constraint_hessian(&x[..n], z)?;
        let mut out = Array2::zeros((n + 1, n + 1));
        out.slice_mut(ndarray::s![..n, ..n]).assign(&h);
        Some(out)
    }

    fn report_value(&self, scaled: f64) -> f64 {
        scaled
    }

    fn report_violation(&self, x: &[f64], _c: &Array1<f64>) -> f64 {
        let n = self.inner.dim();
        self.inner.constraints(&x[..n]).iter().fold(0.0f64, |m, v| m.max(-v))
    }

    fn report_kkt(&self, dual: &Array1<f64>, comp: f64) -> f64 {
        dual.iter().fold(comp, |m, v| m.max(v.abs()))
    }
}
