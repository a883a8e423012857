//! `ftrlink` — batch experiment runner for FTR fading link analysis.
//!
//! ```text
//! ftrlink run <config.json> [--out DIR] [--seed N] [--threads N] [--no-timing]
//! ftrlink validate <config.json>
//! ```
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 numerical
//! failure. The `FTRLINK_THREADS` environment variable overrides the worker
//! thread count; an explicit `--threads` flag wins over both.

mod config;
mod run;

use clap::{Parser, Subcommand};
use run::{RunError, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ftrlink", about = "FTR fading link analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config and write its CSV.
    Run {
        config: PathBuf,
        /// Directory for the output file (defaults to the config's `output`
        /// path interpreted relative to the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the Monte-Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker thread count (wins over FTRLINK_THREADS).
        #[arg(long)]
        threads: Option<usize>,
        /// Write zeros to the wall-time column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check a config for schema and feasibility problems without computing.
    Validate { config: PathBuf },
}

fn configure_threads(flag: Option<usize>) {
    let count = flag.or_else(|| {
        std::env::var("FTRLINK_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = count {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match config::load(&config).and_then(|c| c.validate()) {
            Ok(report) => {
                println!("ok: {report}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("invalid config: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run { config, out, seed, threads, no_timing } => {
            configure_threads(threads);
            let cfg = match config::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("invalid config: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { seed_override: seed, emit_timing: !no_timing };
            let csv = match run::run(&cfg, &opts) {
                Ok(csv) => csv,
                Err(RunError::Config(e)) => {
                    eprintln!("invalid config: {e}");
                    return ExitCode::from(2);
                }
                Err(RunError::Numerical(e)) => {
                    eprintln!("numerical failure: {e}");
                    return ExitCode::from(3);
                }
            };
            let target = match &out {
                Some(dir) => dir.join(
                    std::path::Path::new(&cfg.output)
                        .file_name()
                        .unwrap_or_else(|| std::ffi::OsStr::new("out.csv")),
                ),
                None => PathBuf::from(&cfg.output),
            };
            if let Some(parent) = target.parent() {
                if !parent.as_os_str().is_empty() {
                    if let Err(e) = std::fs::create_dir_all(parent) {
                        eprintln!("cannot create output directory: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            match std::fs::write(&target, csv) {
                Ok(()) => {
                    println!("wrote {}", target.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("cannot write {}: {e}", target.display());
                    ExitCode::from(2)
                }
            }
        }
    }
}
