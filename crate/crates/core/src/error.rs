use thiserror::Error;

/// Errors produced by the analytics, learners and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "series did not converge after {terms} terms (partial value {partial}, tail bound {bound})"
    )]
    NonConvergence {
        partial: f64,
        bound: f64,
        terms: usize,
    },

    #[error("singular design: smallest singular value {sigma_min:e} below threshold {threshold:e}")]
    SingularDesign { sigma_min: f64, threshold: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
