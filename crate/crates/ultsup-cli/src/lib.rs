//! Command-line front end for the drawdown stopping solver.
//!
//! A run is described by a JSON configuration file (model, offset `b`,
//! barrier list, output grid, simulation settings) plus a handful of flag
//! overrides. Commands: `validate`, `solve`, `curves`, `simulate`,
//! `verify`. Exit codes: `0` success, `1` verification failure, `2` bad
//! configuration, `3` numerical failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;

use std::fmt;

/// Errors mapped onto the process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unusable configuration or input: exit code 2.
    Config(String),
    /// A numerical routine or simulation failed: exit code 3.
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(msg) => write!(f, "configuration error: {msg}"),
            Self::Numeric(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl From<ultsup::Error> for CliError {
    fn from(e: ultsup::Error) -> Self {
        use ultsup::Error::*;
        match e {
            Domain { .. } | Argument(_) | ModelCondition(_) | InvalidParameter(_)
            | CaseOne { .. } | UnsupportedPenalty(_) | NotApplicable(_) => {
                Self::Config(e.to_string())
            }
            DegenerateModel(_) | Numerics(_) | SimulationBudget { .. } => {
                Self::Numeric(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("i/o: {e}"))
    }
}

/// Outcome of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Everything ran and, where applicable, all checks passed.
    Clean,
    /// The run completed but at least one verification check failed.
    VerificationFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Clean => 0,
            Self::VerificationFailed => 1,
        }
    }
}
