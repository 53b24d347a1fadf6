//! `dapd`: generate instances, run the simulator and baselines, verify runs
//! against the convergence theory, and tabulate comparisons and sweeps.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 verification failure.

mod args;
mod compare;
mod config;
mod generate;
mod output;
mod run;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate::generate(a).map(|_| true),
        Command::Run(a) => run::run(a).map(|_| true),
        Command::Verify(a) => run::verify(a),
        Command::Compare(a) => compare::compare(a).map(|_| true),
        Command::Sweep(a) => sweep::sweep(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
