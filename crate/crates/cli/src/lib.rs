//! Batch front end for the `cryptoherm` library.
//!
//! A run reads one JSON configuration, dispatches to the subcommand named in
//! its `command` field and writes JSON documents and trajectory tables to an
//! output directory. Exit status: 0 success, 1 numerical failure, 2 bad
//! configuration.

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{commands, RunError, Subcommand, Summary};
pub use config::{parse_config, Command, ConfigError, ModelSource, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cryptoherm",
    version,
    about = "Time-dependent cryptohermitian quantum dynamics"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory (overrides `output.dir`; default ./out).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    let cmd = commands().get(cfg.command.name())?;
    let mut sink = output::Sink::new(out_dir, cfg.format)?;
    log::info!("running {} (seed {})", cfg.command, cfg.seed);
    let summary = cmd.run(cfg, &mut sink)?;
    Ok(RunReport {
        files: sink.written().to_vec(),
        summary,
    })
}

fn init_logging(quiet: bool) {
    let level = if quiet {
        log::LevelFilter::Error
    } else {
        log::LevelFilter::Info
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

/// Runs the CLI and returns the process exit status.
pub fn execute(cli: &Cli) -> i32 {
    init_logging(cli.quiet);
    let text = match fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ConfigError: cannot read {}: {e}", cli.config.display());
            return EXIT_CONFIG;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ConfigError: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match run(&cfg, &out) {
        Ok(report) => {
            if !cli.quiet {
                for line in &report.summary {
                    println!("{line}");
                }
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            EXIT_NUMERICAL
        }
    }
}
