//! Batch front end for the conewave engine.
//!
//! Verbs: `eig | geometry | crosscheck | decay | strichartz | counterexample`.
//! Exit codes: 0 pass, 1 usage/config error, 2 mathematical precondition
//! violation, 3 numerical-budget failure.

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::RunConfig;
use output::OutputDir;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "conewave",
    about = "Spectral experiments for wave flows on product cones with critical electromagnetic potentials"
)]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV tables and summary.json
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    /// Override a tolerance, e.g. --tol-override dual_rep=5e-4
    #[arg(long = "tol-override", value_name = "KEY=VAL")]
    tol_overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the angular eigenproblem and report ν₀, α, p(α), diagnostics
    Eig,
    /// Distance/length spectra, NREC, curvature test, conjugate radii
    Geometry,
    /// Dual-representation and Stone's-formula cross-checks
    Crosscheck,
    /// Dispersive decay-exponent fit for a band-localized half-wave kernel
    Decay,
    /// Strichartz-norm ratios over a random band-limited ensemble
    Strichartz,
    /// Sharpness counterexample growth at and above p(α)
    Counterexample,
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let config_path = cli
        .config
        .ok_or_else(|| anyhow::anyhow!("--config PATH is required"))?;
    let mut cfg = RunConfig::load(&config_path)?;
    for ov in &cli.tol_overrides {
        let (key, val) = ov
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--tol-override expects KEY=VAL, got {ov}"))?;
        cfg.override_tolerance(key, val)?;
    }
    let out = OutputDir::create(cli.out, &cfg)?;
    println!("config hash: {}", out.hash());
    match cli.command {
        Command::Eig => commands::cmd_eig(&cfg, &out),
        Command::Geometry => commands::cmd_geometry(&cfg, &out),
        Command::Crosscheck => commands::cmd_crosscheck(&cfg, &out),
        Command::Decay => commands::cmd_decay(&cfg, &out),
        Command::Strichartz => commands::cmd_strichartz(&cfg, &out),
        Command::Counterexample => commands::cmd_counterexample(&cfg, &out),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(commands::exit_code_for(&err));
        }
    }
}
