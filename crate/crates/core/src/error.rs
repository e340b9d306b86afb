use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("evaluation at psi = {psi} is inside the excluded pole band (margin {margin})")]
    PoleEvaluation { psi: f64, margin: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative surface Jacobian {value:e} at sample {index}")]
    NonConvexSample { index: usize, value: f64 },
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, ShapeError>;
