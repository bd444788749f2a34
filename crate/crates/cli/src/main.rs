use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use eqsrc_cli::{execute, Command, Format, Invocation, PRECISION_ENV};

/// Equilibrium measures and large-n asymptotics for the equispaced external
/// source model.
#[derive(Debug, Parser)]
#[command(name = "eqsrc", version)]
struct Args {
    command: Command,
    /// JSON job specification
    #[arg(long)]
    spec: PathBuf,
    /// output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation {
        command: Some(args.command),
        out: args.out,
        format: args.format,
        precision_env: std::env::var(PRECISION_ENV).ok(),
    };
    match execute(&args.spec, &inv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eqsrc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
