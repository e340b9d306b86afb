use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use supportshape_nlp::SolveOptions;
use supportshape_problems::Params;

use crate::RunError;

/// Artifacts a run can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    BoundaryCsv,
    MeshObj,
    Log,
}

impl Emit {
    pub const ALL: [Emit; 4] = [Emit::Json, Emit::BoundaryCsv, Emit::MeshObj, Emit::Log];

    pub fn file_name(self) -> &'static str {
        match self {
            Emit::Json => "result.json",
            Emit::BoundaryCsv => "boundary.csv",
            Emit::MeshObj => "mesh.obj",
            Emit::Log => "solve.log",
        }
    }
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "json" => Ok(Emit::Json),
            "boundary_csv" | "csv" => Ok(Emit::BoundaryCsv),
            "mesh_obj" | "obj" => Ok(Emit::MeshObj),
            "log" => Ok(Emit::Log),
            other => Err(format!("unknown artifact `{other}` (expected json, boundary_csv, mesh_obj, log)")),
        }
    }
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Emit::Json => "json",
            Emit::BoundaryCsv => "boundary_csv",
            Emit::MeshObj => "mesh_obj",
            Emit::Log => "log",
        })
    }
}

/// Solver settings that override the problem's recommended options.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOverrides {
    pub max_iter: Option<usize>,
    pub tol_kkt: Option<f64>,
    pub tol_feas: Option<f64>,
    pub audit: Option<bool>,
    pub force_bfgs: Option<bool>,
}

impl SolverOverrides {
    pub fn apply(&self, mut opts: SolveOptions) -> SolveOptions {
        if let Some(v) = self.max_iter {
            opts.max_iter = v;
        }
        if let Some(v) = self.tol_kkt {
            opts.tol_kkt = v;
        }
        if let Some(v) = self.tol_feas {
            opts.tol_feas = v;
        }
        if let Some(v) = self.audit {
            opts.audit = v;
        }
        if let Some(v) = self.force_bfgs {
            opts.force_bfgs = v;
        }
        opts
    }
}

/// One run: a catalog problem, its parameters, and what to write where.
///
/// ```toml
/// problem = "min_area_cw_2d"
/// seed = 7
/// starts = 1
/// out = "runs/reuleaux"
/// emit = ["json", "boundary_csv", "log"]
///
/// [params]
/// width = 2.0
/// degree = 50
///
/// [solver]
/// max_iter = 300
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub params: Params,
    /// Multistart count; the problem's recommendation when absent.
    pub starts: Option<usize>,
    /// Seed of the first start; start `i` uses `seed + i`.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Artifacts to write; all that apply to the dimension when absent.
    pub emit: Option<Vec<Emit>>,
    pub solver: SolverOverrides,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn problem_name(&self) -> Result<&str, RunError> {
        self.problem.as_deref().ok_or_else(|| RunError::Config("no problem given (use --problem or `problem = ...`)".into()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self) -> u64 {
        self.seed.or(self.params.seed).unwrap_or(0)
    }

    /// Requested artifacts that exist for a problem of dimension `dim`.
    pub fn artifacts(&self, dim: usize) -> Vec<Emit> {
        let requested = self.emit.clone().unwrap_or_else(|| Emit::ALL.to_vec());
        Emit::ALL
            .into_iter()
            .filter(|e| requested.contains(e))
            .filter(|e| match e {
                Emit::BoundaryCsv => dim == 2,
                Emit::MeshObj => dim == 3,
                _ => true,
            })
            .collect()
    }
}

/// Comma-separated artifact list as given on the command line.
pub fn parse_emit_list(s: &str) -> Result<Vec<Emit>, RunError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.parse().map_err(RunError::Config)).collect()
}
