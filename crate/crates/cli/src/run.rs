use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use supportshape_core::{FourierSupport2D, SphericalSupport3D};
use supportshape_nlp::{best, SolveError, Status, StartOutcome};
use supportshape_problems::{build, ObjectiveSpec, Params, Problem, SourceKind};

use crate::artifacts::{boundary_csv, to_json_17, write_atomic, Mesh};
use crate::config::{Emit, RunConfig};
use crate::RunError;

pub const RESULT_SCHEMA: &str = "supportshape.result";
pub const RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceComparison {
    pub key: String,
    pub value: f64,
    pub tolerance: f64,
    pub kind: SourceKind,
    pub source: String,
    pub relative_error: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StartSummary {
    pub start: usize,
    pub seed: u64,
    pub status: Option<Status>,
    pub value: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

/// Contents of `result.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub schema: &'static str,
    pub schema_version: u32,
    pub problem: String,
    pub dim: usize,
    pub degree: usize,
    pub grid: usize,
    pub width_grid: Option<usize>,
    pub objective: ObjectiveSpec,
    pub params: Params,
    pub seed: u64,
    pub starts: usize,
    pub status: Status,
    pub value: f64,
    pub kkt_residual: f64,
    pub max_violation: f64,
    pub iterations: usize,
    pub best_seed: u64,
    pub reference: Option<ReferenceComparison>,
    /// Solution as solved.
    pub coefficients: Vec<f64>,
    /// Rotated (2D) and, for measure-normalized eigenvalue problems, scaled
    /// to unit measure.
    pub canonical_coefficients: Vec<f64>,
    pub runs: Vec<StartSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: RunResult,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.result.status)
    }
}

/// 0 converged, 2 iteration limit or stalled, 3 infeasible.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => 0,
        Status::MaxIter | Status::Stalled => 2,
        Status::Infeasible => 3,
    }
}

/// Validates `cfg` against the catalog without solving.
pub fn prepare(cfg: &RunConfig) -> Result<Problem, RunError> {
    let name = cfg.problem_name()?;
    let mut params = cfg.params.clone();
    params.seed = Some(cfg.seed());
    Ok(build(name, &params)?)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let problem = prepare(cfg)?;
    let out_dir = cfg.output_dir();
    std::fs::create_dir_all(&out_dir).map_err(|e| RunError::Io(format!("{}: {e}", out_dir.display())))?;

    let opts = cfg.solver.apply(problem.options.clone());
    let starts = cfg.starts.unwrap_or(problem.starts).max(1);
    let seed = cfg.seed();
    let outcomes = problem.solve(starts, seed, &opts);
    let report = match best(&outcomes) {
        Some(r) => r,
        None => {
            let first = outcomes.iter().find_map(|o| o.result.as_ref().err()).cloned();
            return Err(first.map_or(RunError::Solve("no start produced a result".into()), solve_error));
        }
    };

    let canonical = problem.canonical(&report.final_coeffs)?;
    let reference = problem.spec.reference.as_ref().map(|r| ReferenceComparison {
        key: r.key.to_string(),
        value: r.value,
        tolerance: r.tolerance,
        kind: r.kind,
        source: r.source.to_string(),
        relative_error: r.relative_error(report.value),
        within_tolerance: r.matches(report.value),
    });
    let result = RunResult {
        schema: RESULT_SCHEMA,
        schema_version: RESULT_SCHEMA_VERSION,
        problem: problem.spec.name.to_string(),
        dim: problem.spec.dim,
        degree: problem.spec.degree,
        grid: problem.spec.grid,
        width_grid: problem.spec.width_grid,
        objective: problem.spec.objective.clone(),
        params: cfg.params.clone(),
        seed,
        starts,
        status: report.status,
        value: report.value,
        kkt_residual: report.kkt_residual,
        max_violation: report.max_violation,
        iterations: report.iterations,
        best_seed: report.seed,
        reference,
        coefficients: report.final_coeffs.clone(),
        canonical_coefficients: canonical.clone(),
        runs: outcomes.iter().map(summary).collect(),
    };

    let mut written = Vec::new();
    for emit in cfg.artifacts(problem.spec.dim) {
        let contents = match emit {
            Emit::Json => to_json_17(&result)?,
            Emit::BoundaryCsv => boundary_csv(&FourierSupport2D::from_coeffs(&canonical)?),
            Emit::MeshObj => Mesh::default_for(&SphericalSupport3D::from_coeffs(&canonical)?)?.to_obj(),
            Emit::Log => solve_log(&result, &outcomes),
        };
        let path = out_dir.join(emit.file_name());
        write_atomic(&path, contents.as_bytes())?;
        written.push(path);
    }
    Ok(RunOutcome { result, written })
}

fn solve_error(e: SolveError) -> RunError {
    RunError::Solve(e.to_string())
}

fn summary(o: &StartOutcome) -> StartSummary {
    match &o.result {
        Ok(r) => StartSummary {
            start: o.start,
            seed: o.seed,
            status: Some(r.status),
            value: Some(r.value),
            iterations: Some(r.iterations),
            error: None,
        },
        Err(e) => StartSummary {
            start: o.start,
            seed: o.seed,
            status: None,
            value: None,
            iterations: None,
            error: Some(e.to_string()),
        },
    }
}

/// Per-start iteration records as JSON lines under `#` headers.
fn solve_log(result: &RunResult, outcomes: &[StartOutcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# problem {} dim {} degree {} seed {} starts {}", result.problem, result.dim, result.degree, result.seed, result.starts);
    for o in outcomes {
        match &o.result {
            Ok(r) => {
                let _ = writeln!(s, "# start {} seed {}", o.start, o.seed);
                for rec in &r.log {
                    let _ = writeln!(s, "{}", rec.to_json_line());
                }
                let _ = writeln!(
                    s,
                    "# start {} seed {}: {} value {:.16e} kkt {:.3e} violation {:.3e} iterations {}",
                    o.start,
                    o.seed,
                    r.status.as_str(),
                    r.value,
                    r.kkt_residual,
                    r.max_violation,
                    r.iterations
                );
            }
            Err(e) => {
                let _ = writeln!(s, "# start {} seed {}: error: {e}", o.start, o.seed);
            }
        }
    }
    let _ = writeln!(s, "# best: {} value {:.16e} (seed {})", result.status.as_str(), result.value, result.best_seed);
    s
}
