//! Experiment runner behind the `hpl` binary.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod oracle;
pub mod output;

use std::process::ExitCode;

use hpl_core::HplError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("probe regression: {0}")]
    ProbeRegression(String),
    #[error("identity residual over budget: {0}")]
    Identity(String),
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::ProbeRegression(_) => 2,
            Self::Identity(_) => 3,
            Self::Hypothesis(_) => 4,
            Self::Io(_) => 5,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Library errors raised while setting up an experiment. Hypothesis errors
/// keep their own exit code; everything else is a configuration problem.
pub fn setup_error(e: HplError) -> CliError {
    match e {
        HplError::Hypothesis(m) => CliError::Hypothesis(m),
        other => CliError::Config(other.to_string()),
    }
}
