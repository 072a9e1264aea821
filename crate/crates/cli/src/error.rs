use std::process::ExitCode;

use critspectra::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }
}

fn is_numerical(e: &CoreError) -> bool {
    match e {
        CoreError::NotSymmetric { .. } | CoreError::Fit(_) | CoreError::Numerical(_) => true,
        CoreError::Run { source, .. } => is_numerical(source),
        _ => false,
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if is_numerical(&e) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Precondition(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
