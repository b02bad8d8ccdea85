use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dtnsim::analysis::{discover_runs, load_run, summarize};
use dtnsim::engine::{load_config_file, run, run_batch, ConfigError};

#[derive(Parser)]
#[command(name = "dtnsim", version, about = "Delay-tolerant network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's `output`, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every combination of a sweep config.
    Batch {
        #[arg(long)]
        config: PathBuf,
        /// Parallel runs (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute saturation and occupancy tables from run outputs.
    Analyze {
        /// A run directory or a batch directory of runs.
        #[arg(long)]
        logs: PathBuf,
        /// Total node count (default: read from each run's manifest).
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// EMA smoothing factor.
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, seed, out } => {
            let mut runs = load_config_file(&config).with_context(|| format!("loading {}", config.display()))?;
            if runs.len() != 1 {
                return Err(ConfigError::HasSweeps(runs.len())).context("use `batch` for sweeps");
            }
            let mut cfg = runs.remove(0);
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let start = Instant::now();
            let output = run(&cfg)?;
            output.write_to(&dir)?;
            log::info!(
                "{} records, max average occupancy {:.4}% in {:.1?}; wrote {}",
                output.records.len(),
                output.max_avg_occupancy(),
                start.elapsed(),
                dir.display()
            );
        }
        Command::Batch { config, jobs, out } => {
            let runs = load_config_file(&config).with_context(|| format!("loading {}", config.display()))?;
            let dir = out
                .or_else(|| runs.first().and_then(|c| c.output.clone()))
                .unwrap_or_else(|| PathBuf::from("out"));
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            log::info!("{} runs on {jobs} threads into {}", runs.len(), dir.display());
            let entries = run_batch(&runs, &dir, jobs)?;
            let failed = entries.iter().filter(|e| e.error.is_some()).count();
            if failed > 0 {
                bail!("{failed} of {} runs failed; see {}", entries.len(), dir.join("index.csv").display());
            }
        }
        Command::Analyze { logs, nodes, out, alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                bail!("--alpha must be in (0, 1]");
            }
            let dirs = discover_runs(&logs)?;
            if dirs.is_empty() {
                bail!("no runs found under {}", logs.display());
            }
            let runs: Vec<_> = dirs.iter().map(|d| load_run(d, nodes)).collect();
            let rows = summarize(&runs, &out, alpha)?;
            for r in &rows {
                log::info!(
                    "{}: {} messages, {} unsaturated, max average occupancy {}",
                    r.name,
                    r.messages(),
                    r.unsaturated(),
                    r.max_avg_occupancy.map_or("-".into(), |x| format!("{x:.4}%"))
                );
            }
        }
    }
    Ok(())
}
