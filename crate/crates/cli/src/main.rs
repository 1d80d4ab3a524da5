//! `tlkit`: run tester/learner experiments, generate datasets, and run
//! fooling experiments from the command line.

mod config;
mod io;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use tlkit_core::dist::Distribution;

#[derive(Parser)]
#[command(name = "tlkit", version, about = "Distribution tester/learner toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        /// Path to the JSON configuration.
        #[arg(long)]
        config: PathBuf,
        /// Run the learner even on trials the tester rejected.
        #[arg(long)]
        force_learn: bool,
        /// Also write the report JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a labeled CSV dataset from a named distribution.
    Gen {
        /// gaussian | cube | rademacher-coord | scaled-gaussian | parity-planted
        #[arg(long)]
        dist: String,
        /// Example dimension.
        #[arg(long)]
        n: usize,
        /// Number of rows.
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Output CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a support-fooling experiment described by a JSON config file.
    Fool {
        /// Path to the JSON configuration (mode must be "fooling").
        #[arg(long)]
        config: PathBuf,
        /// Also write the report JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(runner::EXIT_ERROR)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { config, force_learn, out } => {
            let cfg = config::load_config(&config)?;
            let (report, code) = runner::execute(&cfg, force_learn)?;
            emit_json(&report, out.as_deref())?;
            Ok(code)
        }
        Command::Gen { dist, n, samples, seed, out } => {
            let dist = Distribution::parse(&dist)
                .ok_or_else(|| anyhow!("unknown distribution {dist:?}"))?;
            if n == 0 || samples == 0 {
                bail!("n and samples must be >= 1");
            }
            if dist == Distribution::ParityPlanted && n < 3 {
                bail!("parity-planted requires n >= 3");
            }
            let data = io::generate_dataset(dist, n, samples, seed);
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    io::write_csv(&data, file)?;
                }
                None => io::write_csv(&data, std::io::stdout().lock())?,
            }
            Ok(runner::EXIT_OK)
        }
        Command::Fool { config, out } => {
            let cfg = config::load_config(&config)?;
            let config::ModeConfig::Fooling(fp) = &cfg.mode else {
                bail!("fool requires a config with mode = \"fooling\"");
            };
            let report = runner::run_fooling_mode(&cfg, fp)?;
            emit_json(&report, out.as_deref())?;
            Ok(runner::EXIT_OK)
        }
    }
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&std::path::Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
