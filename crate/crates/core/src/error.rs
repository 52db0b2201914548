use thiserror::Error;

/// Errors raised by the mapping laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A time or parameter lies outside the validity range of a scale profile.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operator product would exceed the supported polynomial degree.
    #[error("degree overflow: degree {degree} exceeds the limit {limit}")]
    DegreeOverflow { degree: usize, limit: usize },

    /// Operands do not have the algebraic structure an operation requires.
    #[error("structure error: {0}")]
    Structure(String),

    /// A resampled state lost more of its norm off-grid than tolerated.
    #[error("aliasing: {fraction:.3e} of the norm falls outside the grid ({context})")]
    Aliasing { fraction: f64, context: String },

    /// An iterative integration failed to meet its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// A time integration blew up.
    #[error("instability: {0}")]
    Instability(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration problems, aggregated.
    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
