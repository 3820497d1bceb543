//! Harness-level error type and process exit codes.

use isidec_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical degeneracy: {0}")]
    Numerical(CoreError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<CoreError> for SimError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput { what } => SimError::Config(what.to_string()),
            other => SimError::Numerical(other),
        }
    }
}

impl SimError {
    /// CLI exit code: 2 for configuration problems, 3 for numerical
    /// degeneracy, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::Numerical(_) => 3,
            SimError::Io { .. } => 1,
        }
    }
}
