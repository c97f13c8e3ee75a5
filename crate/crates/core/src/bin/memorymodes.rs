// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use memorymodes::config::validate_config;
use memorymodes::model::Validation;
use memorymodes::runner::{run, Experiment, RunConfig};
use memorymodes::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Amplitudes,
    Rates,
    Identity,
    Evolve,
    Nmqj,
    Mcwf,
    Compare,
    Info,
    Fig2,
}

impl From<Cmd> for Experiment {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Amplitudes => Experiment::Amplitudes,
            Cmd::Rates => Experiment::Rates,
            Cmd::Identity => Experiment::Identity,
            Cmd::Evolve => Experiment::Evolve,
            Cmd::Nmqj => Experiment::Nmqj,
            Cmd::Mcwf => Experiment::Mcwf,
            Cmd::Compare => Experiment::Compare,
            Cmd::Info => Experiment::Info,
            Cmd::Fig2 => Experiment::Fig2,
        }
    }
}

/// Atom–reservoir memory experiments.
#[derive(Debug, Parser)]
#[command(name = "memorymodes", version)]
struct Args {
    experiment: Cmd,
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble size for stochastic experiments.
    #[arg(long)]
    n: Option<u64>,
    /// Skip the Lindblad-validity checks on the pseudomode decay rates.
    #[arg(long)]
    allow_nonphysical: bool,
}

fn threads_from_env() -> Result<usize, Error> {
    match std::env::var("MEMORYMODES_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("MEMORYMODES_THREADS must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn main_inner(args: Args) -> Result<(), Error> {
    let threads = threads_from_env()?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    let validation = if args.allow_nonphysical { Validation::AllowNonphysical } else { Validation::Strict };
    let model = validate_config(&args.config, validation)?;
    for w in &model.warnings {
        eprintln!("warning: {w}");
    }
    let cfg = RunConfig::new(args.experiment.into(), model, validation, args.out, args.seed, args.n)?;
    let manifest = run(&cfg)?;
    println!("{}: wrote {}", cfg.experiment.name(), manifest.artifacts.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            eprintln!("error: {}", msg.lines().next().unwrap_or(""));
            for line in msg.lines().skip(1) {
                eprintln!("{line}");
            }
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
