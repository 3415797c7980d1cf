mod args;
mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use crate::args::{Cli, FileConfig, Format};
use crate::error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let cmd = &cli.command;
    let file = FileConfig::load(cmd.process().config.as_ref())?;
    let output = cmd.output();
    let format = output.format.or(file.format).unwrap_or_default();
    let out = output.out.clone().or(file.out.clone());
    let outcome = commands::run(cmd, &file)?;

    let bytes = match format {
        Format::Json => report::to_json(&Value::Object(outcome.body)),
        Format::Csv => {
            let table = outcome.table.as_ref().ok_or_else(|| {
                CliError::Validation(format!("{} has no profile table; use --format json", cmd.name()))
            })?;
            report::to_csv(table)?
        }
    };
    let out_dir = std::env::var_os(report::OUT_DIR_VAR).filter(|d| !d.is_empty()).map(PathBuf::from);
    let dest = report::destination(out.as_deref(), out_dir.as_deref(), cmd.name(), format);
    report::write(&bytes, dest.as_deref())?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("exclusia: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
