use std::path::{Path, PathBuf};

use crate::container::ContainerError;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error(transparent)]
    Core(#[from] ctwm_core::Error),
}

impl CliError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Format(_) => 4,
            CliError::Container(_) => 5,
            CliError::Core(ctwm_core::Error::Capacity { .. }) => 7,
            CliError::Core(_) => 6,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Prefixes format errors with the offending file.
    pub fn with_path(self, path: &Path) -> Self {
        match self {
            CliError::Format(msg) => CliError::Format(format!("{}: {msg}", path.display())),
            other => other,
        }
    }
}
