//! `dzd`: verification, decomposition, simulation and sweep runner.

mod cmd;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dzd_core::{PayoffMatrix, PayoffOrdering};

#[derive(Debug, Parser)]
#[command(
    name = "dzd",
    version,
    about = "Memory-one strategy laboratory for the iterated prisoner's dilemma"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Payoffs as R,S,T,P
    #[arg(long, global = true, default_value = "3,0,5,1", value_parser = parse::payoffs)]
    pub payoffs: [f64; 4],
    /// Only require T != S instead of the prisoner's dilemma ordering
    #[arg(long, global = true)]
    pub permissive: bool,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    pub fn ordering(&self) -> PayoffOrdering {
        if self.permissive {
            PayoffOrdering::Permissive
        } else {
            PayoffOrdering::Strict
        }
    }

    pub fn matrix(&self) -> Result<PayoffMatrix<f64>, cmd::Failure> {
        PayoffMatrix::from_f64s(self.payoffs, self.ordering()).map_err(cmd::Failure::usage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that TFT equalizes payoff moments, MGFs and distributions
    VerifyTft(cmd::verify::VerifyArgs),
    /// Decompose a strategy's Press-Dyson vector against a payoff basis
    Decompose(cmd::decompose::DecomposeArgs),
    /// Simulate repeated play with a seeded generator
    Simulate(cmd::simulate::SimulateArgs),
    /// Evaluate WSLS coefficients or TFT identities over a grid
    Sweep(cmd::sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyTft(args) => cmd::verify::run(&cli.common, args),
        Command::Decompose(args) => cmd::decompose::run(&cli.common, args),
        Command::Simulate(args) => cmd::simulate::run(&cli.common, args),
        Command::Sweep(args) => cmd::sweep::run(&cli.common, args),
    };
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
