use thiserror::Error;

/// Which structural predicate a matrix was expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Unitary,
    Hermitian,
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixKind::Unitary => write!(f, "unitary"),
            MatrixKind::Hermitian => write!(f, "hermitian"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not {kind} (residual {residual:.3e} exceeds tolerance {tol:.1e})")]
    NotNormal { kind: MatrixKind, residual: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("every branch probability fell below the floor {floor:.1e}")]
    DegenerateState { floor: f64 },

    #[error("branch probabilities sum to {sum}, not 1")]
    ProbabilityLeak { sum: f64 },

    #[error("interaction violates the non-demolition condition (commutator norm {norm:.3e})")]
    NotQnd { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
