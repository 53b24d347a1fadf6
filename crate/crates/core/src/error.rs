use thiserror::Error;

/// Errors produced while building problems, running simulations, or
/// analysing traces.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` is not a retailer")]
    NotRetailer(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("infeasible: retailer `{retailer}` has inbound capacity {capacity} below demand {demand}")]
    Infeasible {
        retailer: String,
        capacity: f64,
        demand: f64,
    },
    #[error("singular matrix: no usable pivot in column {column} (largest magnitude {magnitude:e})")]
    Singular { column: usize, magnitude: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("trace error: {0}")]
    Trace(String),
    #[error("analysis unavailable: {0}")]
    Analysis(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
