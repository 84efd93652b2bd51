use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quaternion is not a unit: |q| = {0}")]
    NotUnit(f64),

    #[error("degenerate random draw after {0} attempts")]
    DegenerateDraw(usize),

    #[error("metric matrix is singular or not positive definite at the evaluation point")]
    SingularMetric,

    #[error("rank deficient frame: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("integration step failure: drift {drift:e} exceeds {limit:e}")]
    StepFailure { drift: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
