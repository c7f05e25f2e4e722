mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::ExperimentConfig;

/// Bad flags, files or values supplied by the user.
#[derive(Debug)]
pub(crate) struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err.chain().any(|e| {
        e.downcast_ref::<Usage>().is_some()
            || e.downcast_ref::<vsl_core::Error>().is_some_and(|e| e.is_validation())
    });
    if validation {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Gen(a) => commands::gen(a, &cfg),
        Command::Simulate(a) => commands::simulate(a, &cfg),
        Command::Analyze(a) => commands::analyze(a),
        Command::Fit(a) => commands::fit(a, &cfg),
        Command::Report(a) => commands::report(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
