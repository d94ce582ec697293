use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config or arguments. One message per problem.
    #[error("invalid input:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("usage: {0}")]
    Usage(String),
    #[error("evaluation failed: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for validation and usage errors, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Usage(_) => 1,
            CliError::Runtime(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<respat::ModelError> for CliError {
    fn from(e: respat::ModelError) -> Self {
        CliError::Runtime(e.to_string())
    }
}
