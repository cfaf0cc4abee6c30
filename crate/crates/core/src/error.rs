use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate discretization: {0}")]
    DegenerateDiscretization(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate pivot at iteration {iteration}: |pivot| = {pivot:e} (row {row}, column {col}); trace: {trace}")]
    DegeneratePivot {
        iteration: usize,
        row: usize,
        col: usize,
        pivot: f64,
        trace: String,
    },

    #[error("linear program certification failed: {0}")]
    Certification(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
