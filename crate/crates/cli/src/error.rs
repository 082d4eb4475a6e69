use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    /// `path` locates the offending node, e.g. `dim/0/select`.
    #[error("type error at {path}: {message}")]
    Type { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] alexdb_core::Error),
}

impl CliError {
    /// 1 for failures of the operation itself, 2 for malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 1,
            CliError::Parse { .. } | CliError::Type { .. } | CliError::Usage(_) => 2,
        }
    }
}
