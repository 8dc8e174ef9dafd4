use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal of length {got} is incompatible with {expected} nodes")]
    Dimension { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid passband: {0}")]
    InvalidPassband(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("eigensolver failed to converge (residual {residual:.3e})")]
    Numerical { residual: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: {source}")]
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

    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidPassband(_) => 2,
            Error::Numerical { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}
