use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the library.
///
/// Variants are grouped so front ends can map them onto exit codes:
/// [`Error::is_condition_failure`] covers everything that is a mathematical
/// obstruction rather than malformed input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("condition {check} failed: {detail}")]
    Condition { check: &'static str, detail: String },

    #[error("eigenvalue matching is ambiguous between samples {sample} and {next}; refine the parameter grid")]
    AmbiguousMatching { sample: usize, next: usize },

    #[error("cannot classify arc for {stage}: {detail}")]
    ArcClassification { stage: String, detail: String },

    #[error("{what} cap exceeded in {stage}: required {required}, cap {cap}; try adaptive mode")]
    CapExceeded {
        stage: String,
        what: &'static str,
        required: usize,
        cap: usize,
    },

    #[error("{stage} is infeasible: {detail}")]
    Infeasible { stage: String, detail: String },

    #[error("{stage} did not reach tolerance {tolerance:e} (best {achieved:e})")]
    NotConverged {
        stage: String,
        tolerance: f64,
        achieved: f64,
    },
}

impl Error {
    pub fn is_condition_failure(&self) -> bool {
        !matches!(self, Error::Dimension(_) | Error::InvalidInput(_))
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
