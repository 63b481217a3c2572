//! `nl4s` command-line front end.

mod classify;
mod experiment;
mod norms;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nl4s::{Error, ErrorKind};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_BLOWUP: u8 = 4;
pub const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(name = "nl4s", version, about = "Fourth-order NLS: regimes, norms, simulation and scaling studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify (d, nu, gamma, mu) queries by theorem regime.
    Classify(classify::Args),
    /// Sobolev, weighted and Lebesgue norms of a field.
    Norms(norms::Args),
    /// Integrate the equation and write a trajectory.
    Simulate(simulate::Args),
    /// Run a study or a sweep of studies.
    Experiment(experiment::Args),
}

pub fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => EXIT_CONFIG,
        ErrorKind::Numerical => EXIT_NUMERICAL,
        ErrorKind::Io => EXIT_IO,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<u8, Error> = match cli.command {
        Command::Classify(a) => classify::run(a),
        Command::Norms(a) => norms::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Experiment(a) => experiment::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        // Downstream reader closed stdout (e.g. `| head`).
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
