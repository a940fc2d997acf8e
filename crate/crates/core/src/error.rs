use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid vertex: {0}")]
    InvalidVertex(String),

    #[error("depth mismatch: expected {expected}, got {got}")]
    DepthMismatch { expected: usize, got: usize },

    #[error("branching mismatch: expected K = {expected}, got K = {got}")]
    BranchingMismatch { expected: usize, got: usize },

    #[error("expected {expected} cell values, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },

    #[error("weight exponent must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("invalid alpha sequence: {0}")]
    InvalidAlpha(String),

    #[error("operation requires K = 2, got K = {0}")]
    RequiresBinary(usize),

    #[error("depth too small for layer schedule: {0}")]
    DepthTooSmall(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("suite `{suite}` needs a different parameter regime: {msg}")]
    Regime { suite: String, msg: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
