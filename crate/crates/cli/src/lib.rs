//! Command implementations behind the `consensus-cake` binary.
//!
//! Everything here is plain functions over paths and strings so the whole
//! surface can be driven in-process by tests; `main` only parses arguments
//! and maps [`CliError`] to the exit-code contract (1 for bad input or a
//! failed verification, 2 when the solver runs out of resolution).

pub mod commands;
pub mod format;
pub mod render;

/// Command-level failure, carrying the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Exhausted(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Exhausted(_) => 2,
            _ => 1,
        }
    }
}

impl From<consensus_cake::Error> for CliError {
    fn from(e: consensus_cake::Error) -> Self {
        match &e {
            consensus_cake::Error::ResolutionExhausted { .. } => CliError::Exhausted(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
