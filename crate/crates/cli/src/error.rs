use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("config error: {key}: {reason}")]
    Key { key: String, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(levy_exit::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn key(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Key {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Key { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<levy_exit::Error> for CliError {
    fn from(e: levy_exit::Error) -> Self {
        match e {
            levy_exit::Error::InvalidParameter { name, reason } => CliError::key(name, reason),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
