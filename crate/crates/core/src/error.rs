//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Array lengths or mesh shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Two meshes that must be nested or identical are not.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    /// A linear solve or time step failed numerically.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A run configuration is malformed.
    #[error("config error: {0}")]
    Config(String),

    /// File I/O failed; the offending path is included.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 validation, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch(_)
            | Error::MeshMismatch(_)
            | Error::Config(_) => 1,
            Error::Numerical(_) => 2,
            Error::Io { .. } => 3,
        }
    }

    /// Wraps an I/O failure with the path it happened at.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
