use projtomo::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("incompatible request: {0}")]
    Incompatible(String),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("interrupted")]
    Interrupted,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) | CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Incompatible(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Interrupted => 130,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(msg) => CliError::Usage(msg),
            CoreError::NotSquare { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::NotHermitian { .. }
            | CoreError::EmptyPovm => CliError::Malformed(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}
