// Copyright 2026 The fluxpulse Authors
// SPDX-License-Identifier: Apache-2.0

//! `fluxpulse` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "fluxpulse", version, about = "Design, simulate and calibrate adiabatic CZ flux pulses")]
struct Cli {
    /// TOML run configuration. Flags override values from the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Design pulses and write samples and spectra.
    Design,
    /// Closed-form leakage predictions against duration.
    Analyze,
    /// Simulate one gate at the configured duration and amplitude.
    Simulate,
    /// Duration and amplitude scan with contour and operating points.
    Scan,
    /// Calibrate every trajectory under every hardware setting.
    HardwareSweep,
    /// Regenerate a standard figure or table.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long)]
    figure: Option<u32>,
    #[arg(long)]
    table: Option<u32>,
}

fn resolve(cli: Cli) -> Result<(Command, RunConfig, PathBuf)> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => toml::from_str("").expect("empty config is valid"),
    };
    let command = match cli.command {
        Some(Sub::Design) => Command::Design,
        Some(Sub::Analyze) => Command::Analyze,
        Some(Sub::Simulate) => Command::Simulate,
        Some(Sub::Scan) => Command::Scan,
        Some(Sub::HardwareSweep) => Command::HardwareSweep,
        Some(Sub::Reproduce(args)) => {
            if args.figure.is_some() || args.table.is_some() {
                cfg.reproduce.figure = args.figure;
                cfg.reproduce.table = args.table;
            }
            Command::Reproduce
        }
        None => cfg.command.context("no subcommand given and the config sets no `command`")?,
    };
    cfg.command = Some(command);
    if let Some(out) = cli.out {
        cfg.output = Some(out);
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    cfg.validate()?;
    let Some(out) = cfg.output.clone() else {
        bail!("no output directory: pass --out or set `output` in the config");
    };
    Ok((command, cfg, out))
}

fn run(cli: Cli) -> Result<()> {
    let (command, cfg, out) = resolve(cli)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    log::info!("running {} into {}", command.as_str(), out.display());
    let artifacts = commands::run(command, &cfg)?;
    output::commit(&out, command.as_str(), &cfg, artifacts)?;
    log::info!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
