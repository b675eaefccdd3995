//! `bii`: compute, compare and audit feature-interaction explanations.

mod commands;
mod document;
mod error;
mod heatmap;
mod source;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CheckAxiomsArgs, CompareArgs, ExplainArgs, HeatmapArgs, PolyfitArgs};
use error::CliError;

/// Lowers the exact-enumeration cap on the number of features.
const EXACT_CAP_VAR: &str = "EXPLAIN_EXACT_CAP";

/// Exit code when a BII axiom run reports a violation.
const REGRESSION_EXIT: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "bii",
    version,
    about = "Banzhaf-style interaction explanations for tabular models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one interaction index for every subset up to --order.
    Explain(ExplainArgs),
    /// Compute several indices on the same game and count sign disagreements.
    Compare(CompareArgs),
    /// Run the seeded axiom suite for an index.
    CheckAxioms(CheckAxiomsArgs),
    /// Least-squares multilinear fit of a game up to --degree.
    Polyfit(PolyfitArgs),
    /// Render an order-1 or order-2 report as a matrix.
    Heatmap(HeatmapArgs),
}

fn apply_cap_override() -> Result<(), CliError> {
    if let Ok(text) = std::env::var(EXACT_CAP_VAR) {
        let cap = text
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{EXACT_CAP_VAR} must be a feature count, got '{text}'")))?;
        bii_core::subsets::set_exact_cap(cap);
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(bii_core::Error::from)?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(bii_core::Error::from)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    apply_cap_override()?;
    match cli.command {
        Command::Explain(args) => emit(&commands::explain(&args)?, args.out.as_deref())?,
        Command::Compare(args) => emit(&commands::compare(&args)?, args.out.as_deref())?,
        Command::CheckAxioms(args) => {
            let (text, regression) = commands::check_axioms(&args)?;
            emit(&text, None)?;
            if regression {
                eprintln!("error: bii violated an axiom");
                return Ok(ExitCode::from(REGRESSION_EXIT));
            }
        }
        Command::Polyfit(args) => emit(&commands::polyfit(&args)?, None)?,
        Command::Heatmap(args) => emit(&commands::heatmap(&args)?, None)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
