//! Command-line front end for the `x1jacobi` library.
//!
//! Every subcommand maps to one library capability; `report` runs them all
//! and writes a versioned JSON report plus plot-ready data files.
//! Exit codes: 0 success, 1 a check or computation failed, 2 input error.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod sections;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

/// Errors surfaced to the user, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flags, configuration or parameters (exit code 2).
    #[error("input error: {0}")]
    Input(String),
    /// A computation failed or a check did not pass (exit code 1).
    #[error("failure: {0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<x1jacobi::Error> for CliError {
    fn from(e: x1jacobi::Error) -> Self {
        use x1jacobi::Error as E;
        match e {
            E::Range { .. }
            | E::Equality { .. }
            | E::Sign { .. }
            | E::Order { .. }
            | E::Domain { .. }
            | E::Invalid(_)
            | E::UnknownStrategy { .. }
            | E::Parse(_) => CliError::Input(e.to_string()),
            E::Nullity { .. }
            | E::Precision(_)
            | E::Convergence(_)
            | E::Threshold(_)
            | E::Degenerate { .. } => CliError::Failure(e.to_string()),
        }
    }
}

/// Parses `args`, runs the command, prints its output and returns the exit
/// code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::execute(parsed) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if !outcome.passed {
                eprintln!("x1jacobi: one or more checks failed");
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("x1jacobi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
