//! `topophase` — phase-space, energy and entropy analysis of rough surfaces.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or flags,
//! 3 internal invariant violation.

mod commands;
mod error;
mod output;
mod pipeline;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{analyze, compare, runin, scatter, synth};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema 1.0.0)");

#[derive(Parser, Debug)]
#[command(name = "topophase", version = VERSION, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a rough profile from a spectral model.
    Synth(synth::SynthArgs),
    /// Run the full evaluation chain on one profile and report as JSON.
    Analyze(analyze::AnalyzeArgs),
    /// Simulate running-in by progressive peak truncation.
    Runin(runin::RuninArgs),
    /// Compare two profiles on a shared phase-space grid.
    Compare(compare::CompareArgs),
    /// Map local Aq values over a height map.
    Scatter(scatter::ScatterArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Runin(a) => runin::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Scatter(a) => scatter::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
