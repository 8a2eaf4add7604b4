//! Command-line driver: reads a JSON run configuration, executes the chosen
//! experiment, and writes CSV artifacts plus a report summary.
//!
//! Exit codes: 0 all checks pass, 1 configuration error, 2 numeric/module
//! error, 3 check failure.

mod config;
mod error;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "repop",
    about = "Kinetic solvers and exact microscopic simulation of immigration under repulsion",
    version
)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker thread count for replica simulations.
    #[arg(long)]
    threads: Option<usize>,

    /// Reject unknown config keys (default).
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,

    /// Ignore unknown config keys.
    #[arg(long)]
    lenient: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn real_main(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        // ignore the error if a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", cli.config.display())))?;
    let cfg = config::parse_config(&text, !cli.lenient)?;
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let summary = runner::run(&cfg, &out_dir, cli.seed)?;
    print!("{}", summary.human_readable());
    if summary.all_pass() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed {
            failed: summary.checks.iter().filter(|c| !c.pass).count(),
            total: summary.checks.len(),
        })
    }
}
