use thiserror::Error;

/// CLI failures carry the process exit code: 1 for malformed configuration,
/// 2 for numeric/module errors, 3 for failed checks.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unknown config key `{0}` (strict mode; pass --lenient to ignore)")]
    UnknownKey(String),
    #[error("config range error: {0}")]
    Range(String),
    #[error("{0}")]
    Module(#[from] repop_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::UnknownKey(_) => 1,
            CliError::Range(_) | CliError::Io(_) => 2,
            CliError::Module(repop_core::Error::BoundViolation { .. }) => 3,
            CliError::Module(_) => 2,
            CliError::ChecksFailed { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
