use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("random polygon generation failed after {attempts} candidate points")]
    GenerationFailed { attempts: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("empty mesh")]
    EmptyMesh,

    #[error("shift {shift} hits a generalized eigenvalue (pivot {pivot:e} at row {row})")]
    ShiftOnEigenvalue { shift: f64, pivot: f64, row: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { pivot: f64, row: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no bracket found for {what} in [{lo}, {hi}]")]
    BracketSearch { what: String, lo: f64, hi: f64 },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
