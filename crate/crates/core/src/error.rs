use thiserror::Error;

/// Errors raised by geometric and numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point outside chart domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate tangent plane (normalized Gram determinant {0:e})")]
    DegeneratePlane(f64),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("trajectory left the chart domain at t = {0}")]
    ExitedDomain(f64),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
