use thiserror::Error;

/// Failures surfaced by the command-line front end, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub(crate) fn config(field: &str, message: &str) -> Self {
        CliError::Config(format!("{field}: {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => crate::EXIT_CONFIG,
            CliError::Numerical(_) => crate::EXIT_NUMERICAL,
        }
    }
}

impl From<rfwpt::Error> for CliError {
    fn from(e: rfwpt::Error) -> Self {
        match e {
            rfwpt::Error::Config { field, message } => CliError::Config(format!("{field}: {message}")),
            rfwpt::Error::Numerical { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
