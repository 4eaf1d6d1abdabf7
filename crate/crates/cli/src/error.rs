use std::path::PathBuf;

/// Failures surfaced by the command-line runner.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] tsablate::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed result record: {source}")]
    Record {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("conflicting results for {key}: config hashes {hashes:?}")]
    Conflict { key: String, hashes: Vec<String> },
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use tsablate::Error as E;
        match self {
            CliError::Usage(_) | CliError::ConfigFile { .. } => EXIT_USAGE,
            CliError::Core(E::Config(_)) => EXIT_USAGE,
            CliError::Core(E::Divergence { .. } | E::NonFinite(_)) => EXIT_DIVERGENCE,
            _ => EXIT_DATA,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
