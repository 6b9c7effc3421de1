mod commands;
mod config;
mod error;

use std::process::ExitCode;

use config::{parse_args, Command, RunConfig};
use error::CliError;

fn run(argv: Vec<String>) -> Result<(), CliError> {
    let cli = parse_args(argv)?;
    let cfg = RunConfig::resolve(&cli.command)?;
    match cli.command {
        Command::Price(_) => commands::price(&cfg),
        Command::Mc(_) => commands::mc(&cfg),
        Command::Hjb(_) => commands::hjb(&cfg),
        Command::Extract(_) => commands::extract(&cfg),
        Command::Convergence(_) => commands::convergence(&cfg),
        Command::Compare(_) => commands::compare(&cfg),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Args(clap_err) => {
                    let _ = clap_err.print();
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
