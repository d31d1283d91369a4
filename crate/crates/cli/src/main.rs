use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mott_kinetics_cli::validate::{render_table, run_validation};
use mott_kinetics_cli::{load_config, run, write_spectrum};

/// Boltzmann relaxation of doublons and holons in the Hubbard model.
#[derive(Parser)]
#[command(name = "mott-kinetics", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured scenario and write its trajectory.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the quasi-particle spectrum of the configured grid as CSV.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle suite and print a pass/fail table.
    Validate {
        /// Only the 4x4 and spectrum checks.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let summary = run(&cfg)?;
            println!(
                "{} steps, {} records, t = {}; wrote {}",
                summary.steps,
                summary.records,
                summary.final_t,
                summary.trajectory.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { config, out } => {
            let cfg = load_config(&config)?;
            let gap = write_spectrum(&cfg, &out)?;
            println!("min gap {gap}; wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { quick } => {
            let checks = run_validation(quick)?;
            print!("{}", render_table(&checks));
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!(
                "{} of {} checks passed",
                checks.len() - failed,
                checks.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
