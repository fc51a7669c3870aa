use thiserror::Error;

use degenlab_core::Error as CoreError;

/// Harness failures; each family has its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config-invalid: {0}")]
    Config(String),
    #[error("numerical-error: {0}")]
    Numerical(String),
    #[error("io-failure: {0}")]
    Io(String),
    #[error("schema-violation: {0}")]
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Schema(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_)
            | CoreError::InvalidRange(_)
            | CoreError::NoRealGap { .. }
            | CoreError::EndpointTheta { .. }
            | CoreError::GridTooShallow { .. }
            | CoreError::SupportViolation(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
