//! Library side of the `shiftlab` command line tool: configuration, check
//! runner, report writers and the preset catalog.

pub mod catalog;
pub mod checks;
pub mod config;
pub mod report;

pub use checks::{run_checks, CheckReport, CheckRun, PlotSeries};
pub use config::{CheckSettings, Construction, ExperimentConfig, ScalarInput};
pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("check failed to run: {0}")]
    Check(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
