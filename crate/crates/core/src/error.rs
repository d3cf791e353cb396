use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (files, ids, dimensions).
    #[error("input error: {0}")]
    Input(String),

    /// A configuration value is out of range or contradictory.
    #[error("config error: {0}")]
    Config(String),

    /// A computation would exceed a size budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A reduced Laplacian system has no unique solution.
    #[error("singular system: {0}")]
    Singular(String),

    /// The linear solver did not reach the requested residual.
    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("accuracy gain undefined: baseline accuracy is zero")]
    UndefinedGain,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            _ => 1,
        }
    }
}
