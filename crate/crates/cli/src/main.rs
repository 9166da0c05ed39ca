//! `fillrad`: sample manifolds, compute Vietoris–Rips barcodes and
//! filling-radius estimates, check bounds and run the constructive probes.
//!
//! Exit codes: 0 success, 1 failed verdict or runtime failure, 2 usage or
//! input error, 3 resource limit.

mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use thiserror::Error;

use args::Cli;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: fillrad_core::Error,
    },
    /// A check ran to completion and reported failures.
    #[error("{0}")]
    Verdict(String),
}

impl CliError {
    pub fn core(context: impl Into<String>, source: fillrad_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::Core { source, .. } => source.kind(),
            CliError::Verdict(_) => "VerdictFailed",
        }
    }

    fn exit_code(&self) -> u8 {
        use fillrad_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Verdict(_) => EXIT_FAILURE,
            CliError::Core { source, .. } => match source {
                e if e.is_resource_limit() => EXIT_RESOURCE,
                E::NoDominantBar { .. }
                | E::DeathAtThreshold { .. }
                | E::EmptyVicinity { .. }
                | E::StrictlyCloserPoint { .. }
                | E::WitnessFailed(_) => EXIT_FAILURE,
                _ => EXIT_USAGE,
            },
        }
    }
}

fn report(err: &CliError) -> ExitCode {
    let context = match err {
        CliError::Core { context, source } => format!("{context}: {source}"),
        other => other.to_string(),
    };
    eprintln!("{}", json!({ "error": err.kind(), "context": context }));
    ExitCode::from(err.exit_code())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FILLRAD_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "FILLRAD_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            return report(&CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };
    if let Err(e) = configure_threads() {
        return report(&e);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
