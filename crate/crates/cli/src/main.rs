//! `alarmtaxis`: run, sweep and analyse the alarm-taxis model from config files.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 numerical failure.

mod analysis;
mod config;
mod error;
mod output;
mod simulate;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{RunConfig, SweepConfig};
use crate::error::{CliError, CliResult, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "alarmtaxis", version, about = "Alarm-taxis predator-prey simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output` in the config, then `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the homogeneous steady states as JSON.
    Steady {
        #[arg(long)]
        b1: f64,
        #[arg(long)]
        b2: f64,
        #[arg(long, default_value_t = 0.0)]
        b3: f64,
        #[arg(long, default_value_t = 0.0)]
        c3: f64,
    },
    /// Scan the (b1, b2) plane for the global-stability conditions.
    Region {
        #[arg(long, value_parser = parse_range, default_value = "0,4")]
        b1_range: (f64, f64),
        #[arg(long, value_parser = parse_range, default_value = "0,3")]
        b2_range: (f64, f64),
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Directory receiving `region.csv`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run every combination of the swept values.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent runs; defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the base config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit `value ≈ C exp(-sigma t)` to a diagnostics column.
    Rate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "dev_Linf_u")]
        column: String,
        #[arg(long, value_parser = parse_range)]
        window: (f64, f64),
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("json output serializes"));
}

fn output_dir(flag: Option<PathBuf>, configured: Option<&Path>, fallback: &str) -> PathBuf {
    flag.or_else(|| configured.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate { config, out, seed } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out = output_dir(out, cfg.output.as_deref(), "out");
            let summary = simulate::simulate(&cfg, &out)?;
            print_json(&summary);
        }
        Command::Steady { b1, b2, b3, c3 } => {
            print_json(&analysis::steady(b1, b2, b3, c3)?);
        }
        Command::Region {
            b1_range,
            b2_range,
            resolution,
            out,
        } => {
            output::ensure_dir(&out)?;
            let summary = analysis::region(b1_range, b2_range, resolution, &out.join("region.csv"))?;
            print_json(&summary);
        }
        Command::Sweep {
            config,
            out,
            workers,
            seed,
        } => {
            let sweep = SweepConfig::load(&config)?;
            let mut points = sweep.points(config.parent())?;
            if let Some(seed) = seed {
                for p in &mut points {
                    p.config.seed = seed;
                }
            }
            let configured = points[0].config.output.clone();
            let out = output_dir(out, configured.as_deref(), "sweep");
            let workers = match workers {
                Some(0) => return Err(CliError::Config("`--workers` must be >= 1".into())),
                Some(n) => n,
                None => std::thread::available_parallelism().map_or(1, |n| n.get()),
            };
            let keys: Vec<String> = sweep.axes.iter().map(|a| a.key.clone()).collect();
            let results = sweep::run_sweep(points, &out, workers)?;
            for r in &results {
                if let Err(msg) = &r.outcome {
                    eprintln!("point {}: {msg}", r.point.index);
                }
            }
            print_json(&sweep::write_summary(&keys, &results, &out)?);
        }
        Command::Rate { input, column, window } => {
            print_json(&analysis::rate(&input, &column, window)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
