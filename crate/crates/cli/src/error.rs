use std::path::PathBuf;

use thiserror::Error;

/// Exit status for bad input: usage, config or unreadable files.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status when the time integration itself fails.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(alarmtaxis::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Core errors raised while validating or preparing a run; `section`
    /// prefixes parameter names so the message points at the config key.
    pub fn from_core(section: &str, err: alarmtaxis::Error) -> Self {
        match err {
            e if e.is_numerical_failure() => CliError::Numerical(e),
            alarmtaxis::Error::InvalidParameter { name, reason } if section.is_empty() => {
                CliError::Config(format!("`{name}`: {reason}"))
            }
            alarmtaxis::Error::InvalidParameter { name, reason } => {
                CliError::Config(format!("`{section}.{name}`: {reason}"))
            }
            e if section.is_empty() => CliError::Config(e.to_string()),
            e => CliError::Config(format!("[{section}] {e}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
