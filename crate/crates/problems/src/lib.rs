//! Catalog of shape optimization problems over support functions: the
//! constant-width, rotor, width-bounded, Cheeger and eigenvalue problems as
//! solver-ready [`NlpProblem`](supportshape_nlp::NlpProblem)s with their
//! reference optima.

mod catalog;
mod eigen;
mod params;
mod reference;

pub use catalog::{
    build, canonical_rotation_2d, container, loop_mfs_config, parse_rotor, ObjectiveSpec, Problem, ProblemSpec,
    PROBLEMS,
};
pub use eigen::{unit_ball_radius, EigenObjective, EigenSample};
pub use params::{MfsParams, Params};
pub use reference::{
    cheeger_unit_square, j_gamma_reuleaux, meissner_volume, reference, reference_table, reuleaux_area, Reference,
    SourceKind,
};

use supportshape_core::ShapeError;
use supportshape_mfs::MfsError;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown problem `{name}`; the catalog has: {}", known.join(", "))]
    UnknownProblem { name: String, known: Vec<&'static str> },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Mfs(#[from] MfsError),
}
