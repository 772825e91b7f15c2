mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, Report};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let mut report = Report::default();
    let result = match &cli.command {
        Command::Run(a) => commands::cmd_run(a, &mut report),
        Command::Tune(a) => commands::cmd_tune(a, &mut report),
        Command::Verify(a) => commands::cmd_verify(a, &mut report),
        Command::Constants(a) => commands::cmd_constants(a, &mut report),
        Command::ParseCheck(a) => commands::cmd_parse_check(a, &mut report),
    };
    report.print();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
