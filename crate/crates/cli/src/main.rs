//! `consensus-cake`: divide, verify, render, batch, metrics.
//!
//! Exit codes: 0 success, 1 invalid input or failed verification, 2 solver
//! resolution exhausted.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use consensus_cake_cli::commands;
use consensus_cake_cli::CliError;

#[derive(Parser)]
#[command(name = "consensus-cake", version, about = "Weighted consensus division of graphical cakes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a consensus division and write the report.
    Divide {
        /// Cake instance file.
        #[arg(long)]
        cake: PathBuf,
        /// Override the entitlement from the cake file.
        #[arg(long)]
        t: Option<f64>,
        /// Consensus tolerance on both residuals.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive a report from its cake file and compare.
    Verify {
        #[arg(long)]
        cake: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Draw the divided cake as SVG.
    Render {
        #[arg(long)]
        cake: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Divide many generated instances and emit a CSV.
    Batch {
        /// Cake class: interval, circle, star, tree, connected-graph,
        /// general-graph.
        #[arg(long)]
        class: String,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify a cake and print its metrics and piece bound.
    Metrics {
        #[arg(long)]
        cake: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Divide { cake, t, tol, out } => {
            let text = commands::cmd_divide(&cake, t, tol, out.as_deref())?;
            print!("{text}");
        }
        Command::Verify { cake, report } => {
            let mismatches = commands::cmd_verify(&cake, &report)?;
            if mismatches.is_empty() {
                println!("verify: pass");
            } else {
                println!("verify: fail");
                for m in &mismatches {
                    println!("  {m}");
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Render { cake, report, out } => {
            commands::cmd_render(&cake, &report, &out)?;
        }
        Command::Batch {
            class,
            count,
            seed,
            tol,
            csv,
        } => {
            let text = commands::cmd_batch(&class, count, seed, tol)?;
            match csv {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Metrics { cake } => {
            print!("{}", commands::cmd_metrics(&cake)?);
        }
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
