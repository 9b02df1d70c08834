use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("invariant violated: {0}")]
    Numeric(#[from] tomowitness::Error),

    #[error("invariant violated: {invariant}: {detail}")]
    Invariant { invariant: &'static str, detail: String },

    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config { .. } => ExitCode::from(2),
            CliError::Numeric(_) | CliError::Invariant { .. } => ExitCode::from(3),
            CliError::Output { .. } => ExitCode::from(2),
        }
    }
}
