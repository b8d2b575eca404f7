use thiserror::Error;

/// Errors produced by the geometric operations.
///
/// Numeric payloads are stored as `f64` regardless of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("vector is not tangent to the simplex (component sum {sum})")]
    NotTangent { sum: f64 },

    #[error("probability component {index} = {value} lies on the simplex boundary")]
    DegenerateProbability { index: usize, value: f64 },

    #[error("tangent vectors are attached to different base points")]
    BaseMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid Markov map: {0}")]
    InvalidMarkovMap(String),

    #[error("maps cannot be composed: {0}")]
    InvalidComposition(String),

    #[error("split parameter k = {0} is outside (0, 1)")]
    InvalidSplit(f64),

    #[error("gradient unavailable: {0}")]
    GradientUnavailable(String),

    #[error("trajectory left the simplex interior at t = {time} (component {index} = {value})")]
    BoundaryExit { time: f64, index: usize, value: f64 },

    #[error("matrix A violates G A G^-1 = A^T (residual {residual:e})")]
    IncompatibleA { residual: f64 },

    #[error("point is off the constraint surface (|P| residual {p_residual:e}, |S| residual {s_residual:e})")]
    ConstraintViolation { p_residual: f64, s_residual: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("coordinate Jacobian is singular")]
    SingularJacobian,

    #[error("wave vectors carry different gauges")]
    GaugeMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
