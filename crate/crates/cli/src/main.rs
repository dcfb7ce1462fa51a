//! `gabordual` command-line entry point.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 when the numerics fail
//! on valid input (not a frame, singular section, band too narrow). Errors
//! are reported on stderr as `error[TAG]: message`.

mod args;
mod commands;
mod config;
mod output;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

#[derive(Debug)]
pub enum CliError {
    Core(gabordual::Error),
    Usage(String),
}

impl From<gabordual::Error> for CliError {
    fn from(e: gabordual::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn report(&self) -> (u8, String) {
        match self {
            CliError::Core(e) => (if e.is_numerical() { 2 } else { 1 }, format!("error[{}]: {e}", e.tag())),
            CliError::Usage(m) => (1, format!("error[E_USAGE]: {m}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => return clap_exit(e),
    };
    let command = match config::resolve(cli) {
        Ok(c) => c,
        Err(config::Resolve::Clap(e)) => return clap_exit(e),
        Err(config::Resolve::Failed(e)) => return fail(e),
    };
    match commands::run(&command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    let (code, line) = e.report();
    eprintln!("{line}");
    ExitCode::from(code)
}

/// Help and version go to stdout with status 0; usage errors exit 1.
fn clap_exit(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            ExitCode::SUCCESS
        }
        _ => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            fail(CliError::Usage(first.to_string()))
        }
    }
}
