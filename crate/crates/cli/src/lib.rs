//! Command-line front end: solver traces, certificate suites, method
//! comparisons and empirical rate fits.

pub mod args;
pub mod commands;
pub mod config;
pub mod svg;

use thiserror::Error;

pub use args::{main_with, Cli};
pub use commands::{cmd_compare, cmd_rates, cmd_run, cmd_verify, RatesOptions, VerifyOptions};
pub use config::{ProblemSource, RunConfig, StepChoice, Y0Mode};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Abort(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn config(error: dualprox_core::Error) -> Self {
        CliError::Usage(error.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Abort(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    CertificateFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::CertificateFailure => 1,
        }
    }
}
