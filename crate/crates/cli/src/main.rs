//! `dexcite` command-line interface.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, Suite};
use error::CliError;

#[derive(Parser)]
#[command(name = "dexcite", version, about = "Directional excitable systems: simulation, analysis and navigation")]
struct Cli {
    /// Config file, or the name of a bundled config (fig2, type1, type2, paper_iv_a, paper_iv_b).
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parameter sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full or reduced system; writes trajectory.csv and spikes.json.
    Simulate,
    /// Nullclines, equilibria, vector field and orbits for each configured input.
    PhasePlane,
    /// Frequency-input curve on a grid.
    Fi,
    /// Excitability thresholds and type classification.
    Thresholds,
    /// Robot navigation scenario; writes navigation.csv and metrics.json.
    Navigate,
    /// Randomized property suites; exits 1 on any violation.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    let loaded = cli.config.as_deref().map(config::load).transpose()?;
    let ctx = Ctx {
        out: cli.out,
        seed: cli.seed,
    };
    let need = || {
        loaded
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --config".into()))
    };
    match cli.command {
        Command::Simulate => commands::simulate(need()?, &ctx),
        Command::PhasePlane => commands::phase_plane(need()?, &ctx),
        Command::Fi => commands::fi(need()?, &ctx),
        Command::Thresholds => commands::thresholds(need()?, &ctx),
        Command::Navigate => commands::navigate(need()?, &ctx),
        Command::Verify { suite } => commands::verify(loaded.as_ref(), suite, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
