use thiserror::Error;

/// Errors raised by the graph, decomposition, contraction and generator
/// layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("no contractible wires")]
    NoWires,
    #[error("generation failed after {attempts} attempts: {msg}")]
    Generation { attempts: usize, msg: String },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("resource limit exceeded at step {step}: {msg}")]
    Resource { step: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
