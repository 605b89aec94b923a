mod args;
mod commands;
mod expr;
mod output;

use std::process::ExitCode;

use clap::Parser;
use mlab_core::ErrorCategory;

use args::Cli;

pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_SELFTEST: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Core(mlab_core::Error),
    Usage(String),
}

impl From<mlab_core::Error> for CliError {
    fn from(e: mlab_core::Error) -> Self {
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

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Domain => EXIT_DOMAIN,
                ErrorCategory::Numerical => EXIT_NUMERICAL,
                ErrorCategory::Io => EXIT_IO,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("MLAB_THREADS must be a positive integer, got '{raw}'")))?;
    // A second initialization only happens in tests that call main twice.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| commands::run(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
