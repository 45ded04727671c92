//! The `fleetassign` command line: argument definitions, file handling,
//! reports and the mapping from failures to exit codes.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

use args::{Cli, Command};
use commands::Context;
use error::CliError;

/// Runs one command and returns what goes to stdout.
pub fn run(cli: &Cli, argv: Vec<String>) -> Result<String, CliError> {
    let ctx = Context::new(argv);
    match &cli.command {
        Command::Solve(args) => commands::solve(&ctx, args),
        Command::Oracle(args) => commands::oracle(&ctx, args),
        Command::Simulate(args) => commands::simulate(&ctx, args),
        Command::Sweep(args) => commands::sweep(&ctx, args),
        Command::RunScenario(args) => commands::run_scenario_cmd(&ctx, args),
        Command::Generate(args) => commands::generate(args),
        Command::Validate(args) => commands::validate(&ctx, args),
    }
}
