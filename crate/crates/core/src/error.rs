use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured input (slice sets, profiles, catalog rows) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// The dilation radius is too small for the grid it is evaluated on.
    #[error("resolution error: radius {radius} is below {min_cells} cells of size {cell}")]
    Resolution {
        radius: f64,
        cell: f64,
        min_cells: f64,
    },

    /// The line minimizer hit its iteration cap. Carries the best state seen.
    #[error("no convergence after {iterations} iterations (best value {best_value}, residual {residual})")]
    Convergence {
        best_value: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("formula not applicable: {0}")]
    FormulaInapplicable(String),

    #[error("cannot parse manifold spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
