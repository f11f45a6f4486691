//! Library half of the `resqfi` binary: config parsing, the subcommands and
//! the verification suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use commands::Artifact;
pub use config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<resqfi_core::Error> for CliError {
    fn from(e: resqfi_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<resqfi_oracle::OracleError> for CliError {
    fn from(e: resqfi_oracle::OracleError) -> Self {
        match e {
            resqfi_oracle::OracleError::Core(c) => c.into(),
            resqfi_oracle::OracleError::InvalidInput(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    artifacts
        .iter()
        .map(|a| output::write_file(dir, &a.name, &a.contents).map_err(CliError::from))
        .collect()
}
