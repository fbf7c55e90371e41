//! `diskfrac`: solve, apply, verify, convergence and eigenvalue tables from the command line.

mod catalog;
mod config;
mod error;
mod run;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "diskfrac", version, about = "Fractional diffusion on the unit disk with variable diffusivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble and solve; writes report.json, coeffs.csv and field.csv
    Solve(Flags),
    /// Forward map of an input expansion; writes report.json and coeffs.csv
    Apply(Flags),
    /// Run a verification suite; writes verify_summary.csv and checks/*.json
    Verify(Flags),
    /// Error decay over a list of truncations; writes convergence.csv
    Convergence(Flags),
    /// Eigenvalue table of the fractional Laplacian; writes eigs.csv
    Eigs(Flags),
}

fn execute(command: Command) -> Result<(), CliError> {
    let (flags, runner): (Flags, fn(&RunConfig) -> Result<run::RunResult, CliError>) = match command {
        Command::Solve(f) => (f, run::run_solve),
        Command::Apply(f) => (f, run::run_apply),
        Command::Verify(f) => (f, run::run_verify),
        Command::Convergence(f) => (f, run::run_convergence),
        Command::Eigs(f) => (f, run::run_eigs),
    };
    let cfg = RunConfig::resolve(&flags)?;
    let result = runner(&cfg)?;
    run::write_outputs(&cfg.out, &result.files)?;
    match result.deferred_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = execute(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
