use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zdm_cli::commands::{self, EmbedArgs, EncodeArgs, GlueArgs, MarkerArgs, RetractArgs, SelectorArgs, VerifyArgs};

/// Certified constructions for zero-dimensional dynamical models.
///
/// Every command writes a JSON report of named checks and exits 0 when
/// all of them hold, 1 when a certificate fails (the report carries a
/// witness), and 2 on unusable input or flags.
#[derive(Parser)]
#[command(name = "zdm", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a subshift for a marker word set and certify it
    Marker(MarkerArgs),
    /// Rewrite host windows to match target pattern statistics
    EmbedDense(EmbedArgs),
    /// Build a cover schedule and certify names, boundary mass, and separation
    Encode(EncodeArgs),
    /// Pick per-measure cover parameters avoiding heavy boundaries
    Selector(SelectorArgs),
    /// Retract a simplex onto a dense face by an affine idempotent map
    SimplexRetract(RetractArgs),
    /// Run staged vertex gluing with displacement certificates
    Glue(GlueArgs),
    /// Run a built-in verification suite end to end
    VerifyAll(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Marker(args) => commands::marker(args),
        Command::EmbedDense(args) => commands::embed_dense(args),
        Command::Encode(args) => commands::encode(args),
        Command::Selector(args) => commands::selector(args),
        Command::SimplexRetract(args) => commands::simplex_retract(args),
        Command::Glue(args) => commands::glue(args),
        Command::VerifyAll(args) => commands::verify_all(args),
    };
    match result {
        Ok(report) if report.pass => ExitCode::from(0),
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("zdm: {e}");
            ExitCode::from(2)
        }
    }
}
