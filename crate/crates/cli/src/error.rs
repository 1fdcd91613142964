use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] wwlab_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit code: 2 for usage and configuration errors, 3 for
    /// experiment failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
