//! Command-line front end: run configurations, result artifacts and the
//! verification suites.

use openblas_src as _;

pub mod artifacts;
pub mod config;
pub mod run;
pub mod verify;

pub use config::{Emit, RunConfig, SolverOverrides};
pub use run::{exit_code, prepare, run, RunOutcome, RunResult};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "SUPPORTSHAPE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Catalog(#[from] supportshape_problems::CatalogError),
    #[error("solve failed: {0}")]
    Solve(String),
    #[error("output: {0}")]
    Io(String),
}

impl From<supportshape_core::ShapeError> for RunError {
    fn from(e: supportshape_core::ShapeError) -> Self {
        RunError::Io(format!("artifact geometry: {e}"))
    }
}

/// Sizes the global worker pool from `SUPPORTSHAPE_THREADS` when set.
pub fn configure_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| RunError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))
}
