//! `entbound`: entanglement lower bounds from projector expectation values.

mod audit;
mod commands;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use entbound::subspace::LambdaSupPolicy;
use entbound::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "entbound",
    version,
    about = "Lower bounds on concurrence and CREN from projector expectation values"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format (default: csv for sweep, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Source of lambda_sup when no closed form applies: closed, net:<eps> or heuristic.
    #[arg(long, global = true, default_value = "heuristic", value_parser = inputs::parse_policy)]
    certify_lambda_sup: LambdaSupPolicy,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound report for one state and projector.
    Bound(commands::BoundArgs),
    /// Bounds along a one-parameter family.
    Sweep(commands::SweepArgs),
    /// Perturbation margin and mixing threshold.
    Robustness(commands::RobustnessArgs),
    /// Randomized property suites.
    Audit(audit::AuditArgs),
}

/// Flags shared by every subcommand.
pub struct Global {
    pub seed: u64,
    pub format: Option<Format>,
    pub policy: LambdaSupPolicy,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::Dimension(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global {
        seed: cli.seed,
        format: cli.format,
        policy: cli.certify_lambda_sup,
    };
    let mut audit_failed = false;
    let result = match &cli.command {
        Command::Bound(a) => commands::bound(a, &global),
        Command::Sweep(a) => commands::sweep(a, &global),
        Command::Robustness(a) => commands::robustness(a, &global),
        Command::Audit(a) => audit::run(a, global.seed).and_then(|r| {
            audit_failed = !r.passed;
            audit::render(&r, &global)
        }),
    }
    .and_then(|text| output::emit(&text, cli.output.as_deref()));
    match result {
        Ok(()) if audit_failed => ExitCode::from(1),
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
