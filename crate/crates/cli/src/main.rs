//! `robin-insulate`: runs one experiment from a TOML config and writes
//! `summary.json` plus CSV tables into the output directory.
//!
//! Exit codes: 0 success, 1 output failure, 2 malformed config or input
//! files, 3 numerical failure.

mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use log::{error, info};
use serde_json::{json, Value};

use config::ExperimentConfig;
use experiments::{Outcome, RunError};

#[derive(Parser)]
#[command(name = "robin-insulate", version, about = "Optimal thermal insulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the closed-form radial solution with f = 1.
    Oracle {
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        eps: Option<f64>,
    },
}

fn summary(cfg: &ExperimentConfig, out: &Outcome) -> Value {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "experiment": cfg.experiment.kind.name(),
        "mesh": out.mesh.clone().unwrap_or(Value::Null),
        "results": Value::Object(out.results.clone()),
        "timestamp": timestamp,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(&summary(cfg, out)).expect("summary serializes");
    text.push('\n');
    std::fs::write(dir.join("summary.json"), text)?;
    for (name, contents) in &out.files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn run(config: &Path, output_dir: Option<PathBuf>) -> ExitCode {
    let mut cfg = match ExperimentConfig::load(config) {
        Ok(c) => c,
        Err(e) => {
            error!("{}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(d) = output_dir {
        cfg.output_dir = d;
    }
    let out = match experiments::run(&cfg) {
        Ok(o) => o,
        Err(RunError::Config(msg)) => {
            error!("{}: {msg}", config.display());
            return ExitCode::from(2);
        }
        Err(RunError::Numerical(e)) => {
            error!("{}: {e}", cfg.experiment.kind.name());
            return ExitCode::from(3);
        }
    };
    if let Err(e) = write_outputs(&cfg.output_dir, &cfg, &out) {
        error!("writing {}: {e}", cfg.output_dir.display());
        return ExitCode::from(1);
    }
    info!("wrote {} files to {}", out.files.len() + 1, cfg.output_dir.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run { config, output_dir } => run(&config, output_dir),
        Command::Oracle { radius, n, beta, h, eps } => match experiments::oracle_lines(radius, n, beta, h, eps) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                error!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
