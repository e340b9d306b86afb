use supportshape_core::ShapeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MfsError {
    #[error("kernel evaluated at its singular point (|x| = {radius:e})")]
    SingularPoint { radius: f64 },
    #[error("collocation matrix is numerically rank deficient (condition estimate {condition:e})")]
    RankDeficiency { condition: f64 },
    #[error("eigenvalue {lambda} is not simple (multiplicity {multiplicity}, gap {gap:e})")]
    DegenerateEigenvalue { lambda: f64, multiplicity: usize, gap: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("could not place {wanted} interior points after {tries} draws")]
    InteriorSampling { wanted: usize, tries: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

impl From<ndarray_linalg::error::LinalgError> for MfsError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        MfsError::Linalg(e.to_string())
    }
}
