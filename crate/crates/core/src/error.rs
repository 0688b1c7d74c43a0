use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("validity error: {0}")]
    Validity(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("eigensolver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate truncation: projected weight {weight:e} is below 1e-12")]
    DegenerateTruncation { weight: f64 },

    #[error("infeasible energy level {level} outside spectral range [{min}, {max}]")]
    Infeasible { level: f64, min: f64, max: f64 },

    #[error("quadrature resolution error: {0}")]
    Resolution(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
