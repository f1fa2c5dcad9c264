use thiserror::Error;

/// Everything the command line can fail with, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {}", .0.name(), .0)]
    Model(#[from] thermolimit::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} acceptance criteria failed")]
    AcceptanceFailed { failed: usize },
}

impl CliError {
    /// 1 for numerical or acceptance failures, 2 for usage and config errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => 1,
            CliError::AcceptanceFailed { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
