//! Command-line front end for the `normcell` library.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric contract
//! failure, 4 I/O error. Failures print a single line on stderr of the form
//! `error kind=<kind> exit=<code> message="<text>"`.

pub mod config;
pub mod experiments;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use config::{resolve, Cli, Experiment};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Contract(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn from_core(e: normcell::Error) -> Self {
        match e {
            normcell::Error::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Contract(_) => "contract",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Contract(_) => EXIT_CONTRACT,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn line(&self) -> String {
        let text = self.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error kind={} exit={} message={:?}", self.kind(), self.exit_code(), text)
    }
}

/// Parses `args`, runs the experiment and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Config(e.kind().to_string() + ": " + &e.to_string());
            eprintln!("{}", err.line());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.line());
            err.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (experiment, flags) = cli.command.split();
    let config = resolve(experiment, flags)?;
    let echo = serde_json::to_string(&config).map_err(|e| CliError::Io(e.to_string()))?;
    eprintln!("config {echo}");

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let table = pool.install(|| experiments::run(&config))?;
    let text = output::render(&config, &table)?;
    match &config.out {
        Some(path) => output::write_atomic(path, &text)?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }

    if experiment == Experiment::OracleCheck {
        let passed = table.report.as_ref().and_then(|r| r["pass"].as_bool()).unwrap_or(false);
        if !passed {
            return Err(CliError::Contract("oracle check failed".into()));
        }
    }
    Ok(())
}
