use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// A computation failed (exit 1).
    #[error(transparent)]
    Compute(#[from] cgauge_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(cgauge_core::Error::InvalidParameter(_)) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}
