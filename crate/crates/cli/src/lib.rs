//! Scenario files, bundled examples and the `cai` subcommands.

pub mod commands;
pub mod examples;
pub mod scenario;

use cai_core::ValidationReport;
use thiserror::Error;

pub use scenario::ScenarioFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(ValidationReport),
    #[error("{0}")]
    Infeasible(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
}

impl CliError {
    /// 0 success, 1 domain infeasibility or violation, 2 input or parse error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Invalid(_) | CliError::Infeasible(_) | CliError::Simulation(_) => 1,
        }
    }
}
