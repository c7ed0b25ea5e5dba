mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, ExperimentSpec};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        ExperimentSpec::from_command(cli.command).and_then(|spec| commands::dispatch(&spec));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dgshock: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
