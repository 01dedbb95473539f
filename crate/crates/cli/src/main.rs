mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, EprCommand, RngCommand};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Epr(EprCommand::Run(a)) => commands::epr::run(a),
        Command::Epr(EprCommand::Sweep(a)) => commands::epr::sweep(a),
        Command::Measure(a) => commands::measure::run(a),
        Command::Rng(RngCommand::Test(a)) => commands::rng::test(a),
        Command::Serve(a) => commands::serve::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
