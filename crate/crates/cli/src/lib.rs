//! Command-line front end for the swapguard simulator.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

use config::{ExperimentConfig, SCHEMA_VERSION};
use output::{to_json, write_file};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Runtime(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Assertion(_) => 1,
            Self::Config(_) | Self::Io(_) | Self::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "swapguard", version, about = "Randomized-swap quarantine simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Common {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for output files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config trial count.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form timing quantities over an on-count grid (CSV).
    Analyze(Common),
    /// Monte Carlo of the timing model against the closed forms.
    SimulateTiming(Common),
    /// Density-matrix simulation of the swap protocol under attack.
    SimulateQuantum(Common),
    /// Numerical checks of the SWAP and ladder-operator identities.
    VerifyAlgebra {
        #[command(flatten)]
        common: Common,
        /// Perturb one Kraus operator so the conjugation check must fail.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Threshold sharing of the schedule seed.
    #[command(subcommand)]
    Shares(SharesCommand),
}

#[derive(Debug, Subcommand)]
pub enum SharesCommand {
    /// Split a seed into `n` share files, any `k` of which recover it.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        secret: Option<u64>,
        #[arg(short = 'k')]
        k: Option<usize>,
        #[arg(short = 'n')]
        n: Option<usize>,
    },
    /// Recover the seed and print the start of its schedule.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

/// What a successful run prints, and whether its checks held.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub pass: bool,
}

fn load_config(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        },
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.trials.is_some() {
        cfg.trials = common.trials;
    }
    Ok(cfg)
}

fn emit(common: &Common, name: &str, text: String) -> Result<String, CliError> {
    if let Some(dir) = &common.out {
        write_file(dir, name, &text)?;
    }
    Ok(text)
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze(common) => {
            let cfg = load_config(&common)?;
            let rows = commands::cmd_analyze(&cfg)?;
            let stdout = emit(&common, "analyze.csv", commands::analyze_csv(&rows))?;
            Ok(Outcome { stdout, pass: true })
        }
        Command::SimulateTiming(common) => {
            let cfg = load_config(&common)?;
            let run = commands::cmd_simulate_timing(&cfg)?;
            if cfg.output.as_ref().is_some_and(|o| o.per_trial_csv) {
                let dir = common
                    .out
                    .as_ref()
                    .ok_or_else(|| CliError::Config("output.per_trial_csv: needs --out".into()))?;
                write_file(dir, "trials.csv", &run.per_trial_csv)?;
            }
            let pass = run.report.acceptance();
            let stdout = emit(&common, "timing.json", to_json(&run.report))?;
            Ok(Outcome { stdout, pass })
        }
        Command::SimulateQuantum(common) => {
            let cfg = load_config(&common)?;
            let report = commands::cmd_simulate_quantum(&cfg)?;
            let pass = report.pass;
            let stdout = emit(&common, "quantum.json", to_json(&report))?;
            Ok(Outcome { stdout, pass })
        }
        Command::VerifyAlgebra { common, inject_fault } => {
            let cfg = load_config(&common)?;
            let report = commands::cmd_verify_algebra(&cfg, inject_fault)?;
            let pass = report.pass;
            let stdout = emit(&common, "algebra.json", to_json(&report))?;
            Ok(Outcome { stdout, pass })
        }
        Command::Shares(SharesCommand::Split { common, secret, k, n }) => {
            let cfg = load_config(&common)?;
            let dir = common
                .out
                .as_ref()
                .ok_or_else(|| CliError::Config("--out: required for shares split".into()))?;
            let run = commands::cmd_shares_split(&cfg, secret, k, n)?;
            for (name, text) in &run.files {
                write_file(dir, name, text)?;
            }
            Ok(Outcome {
                stdout: to_json(&run.report),
                pass: true,
            })
        }
        Command::Shares(SharesCommand::Reconstruct { common, files }) => {
            let cfg = load_config(&common)?;
            let report = commands::cmd_shares_reconstruct(&cfg, &files)?;
            let stdout = emit(&common, "reconstruct.json", to_json(&report))?;
            Ok(Outcome { stdout, pass: true })
        }
    }
}
