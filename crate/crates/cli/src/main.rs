//! Command-line experiment runner.
//!
//! Every subcommand writes one JSON document (or CSV with `--format csv`) to
//! `--out` or stdout. Exit codes: 0 when every configured threshold holds,
//! 1 when a threshold fails, 2 for invalid flags, configs or input files.

mod args;
mod check;
mod config;
mod hypergraph;
mod output;
mod subspace;
mod sum_game;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Bad flags, config or input (exit code 2).
#[derive(Debug)]
pub struct Failure(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.into())
    }
}

/// A completed run; each failed threshold is named in `failures` (exit code 1).
pub struct Outcome {
    pub failures: Vec<String>,
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::SumGame(a) => sum_game::run(&a),
        Command::Hypergraph(a) => hypergraph::run(&a),
        Command::Subspace(a) => subspace::run(&a),
        Command::Verify { target } => check::verify(&target),
        Command::Audit { target } => check::audit(&target),
    }
}

fn main() -> ExitCode {
    let argv = match config::splice(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) if outcome.failures.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("acceptance failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
