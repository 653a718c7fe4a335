use std::path::PathBuf;

/// Everything a command can fail with.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or arguments.
    #[error("config error: {0}")]
    Config(String),
    /// Rejected by the core library.
    #[error(transparent)]
    Core(#[from] evoscheme_core::Error),
    /// Malformed scheme file.
    #[error("{}: {source}", path.display())]
    Parse {
        /// Offending file.
        path: PathBuf,
        /// Decoder diagnostic, with line and column.
        source: serde_json::Error,
    },
    /// Filesystem failure.
    #[error("{}: {source}", path.display())]
    Io {
        /// Path involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// CSV writer failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// Every run ended without a finite fitness.
    #[error("all {0} runs diverged")]
    AllDiverged(usize),
}

impl CliError {
    /// Process exit code: 2 when every run diverged, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::AllDiverged(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, CliError>;
