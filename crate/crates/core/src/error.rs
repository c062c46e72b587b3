use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FupError {
    #[error("invalid Cantor spec: {0}")]
    InvalidSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("growth condition violated at n = {n}: {detail}")]
    Growth { n: u32, detail: String },
    #[error("matrix cap exceeded: {size} lattice points > cap {cap}; reduce the n range or enable sparsified mode")]
    MatrixCap { size: usize, cap: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, FupError>;

impl From<std::io::Error> for FupError {
    fn from(e: std::io::Error) -> Self {
        FupError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for FupError {
    fn from(e: serde_json::Error) -> Self {
        FupError::Config(e.to_string())
    }
}

impl From<csv::Error> for FupError {
    fn from(e: csv::Error) -> Self {
        FupError::Io(e.to_string())
    }
}
