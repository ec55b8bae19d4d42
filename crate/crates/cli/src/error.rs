use thiserror::Error;

/// Errors reported by the command-line driver, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 1).
    #[error("{0}")]
    Validation(String),
    /// Failure while computing or writing results (exit code 2).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<qtm_core::Error> for CliError {
    fn from(e: qtm_core::Error) -> Self {
        match e {
            qtm_core::Error::InvalidConfig { .. } | qtm_core::Error::Domain(_) => CliError::Validation(e.to_string()),
            qtm_core::Error::Consistency(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
