use thiserror::Error;

/// Errors raised by the constructions and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DnoError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: measured error {measured:.3e} exceeds tolerance {tolerance:.3e}")]
    Construction { measured: f64, tolerance: f64 },

    #[error("ill-conditioned: {0}")]
    Conditioning(String),

    #[error("sampler failed at node {index} ({point:?})")]
    Data { index: usize, point: Vec<f64> },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("exact representation: {0}")]
    ExactRepresentation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, DnoError>;

impl From<serde_json::Error> for DnoError {
    fn from(e: serde_json::Error) -> Self {
        DnoError::Serde(e.to_string())
    }
}
