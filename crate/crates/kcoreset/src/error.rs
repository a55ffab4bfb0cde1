use thiserror::Error;

/// Failures surfaced by the command-line tool. Everything except a failed
/// check is a usage or input problem.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] kcoreset_core::Error),
    #[error("check failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}
