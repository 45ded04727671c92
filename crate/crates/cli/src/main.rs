use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use fleetassign_cli::args::Cli;
use fleetassign_cli::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            let err = CliError::usage(first);
            eprintln!("{}", err.line());
            return ExitCode::from(err.class.exit_code() as u8);
        }
    };
    match fleetassign_cli::run(&cli, std::env::args().skip(1).collect()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.class.exit_code() as u8)
        }
    }
}
