use std::path::PathBuf;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("{0}")]
    Solver(#[from] kdv_core::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::File {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// 2 for configuration and validation problems, 3 for numerical
    /// failures while stepping.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if is_runtime_failure(e) => 3,
            _ => 2,
        }
    }
}

/// Errors raised while a scheme was advancing, as opposed to rejected input.
pub fn is_runtime_failure(e: &kdv_core::Error) -> bool {
    matches!(e, kdv_core::Error::Step { .. }) || e.is_numerical()
}

pub type CliResult<T> = Result<T, CliError>;
