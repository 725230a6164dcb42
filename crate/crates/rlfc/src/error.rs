use std::path::PathBuf;

use thiserror::Error;

use crate::manifest::ManifestError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const FORMAT: i32 = 4;
    pub const VERIFICATION: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("codec: {0}")]
    Core(#[from] rlfc_core::Error),
    #[error("manifest: {0}")]
    Manifest(#[from] ManifestError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Manifest(m) if m.is_io() => exit::IO,
            CliError::Format(_) | CliError::Core(_) | CliError::Manifest(_) => exit::FORMAT,
            CliError::Verification(_) => exit::VERIFICATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
