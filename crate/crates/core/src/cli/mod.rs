//! Command-line front end: strict configuration, subcommand dispatch and
//! deterministic artifacts.

pub mod config;
pub mod output;
pub mod run;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::partitions::{enumerate_partitions, enumerate_proper_partitions};

pub use config::{parse_config, parse_config_str, ExperimentConfig, ModelKind};
pub use output::{Report, SummaryRow, Table, Verdict};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SEE_DERIV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "see-deriv", version, about = "Derivative processes of semilinear SEEs: simulation, bounds and Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment configuration
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for CSVs, summary and manifest
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the configured base seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the set partitions of {1..k} in canonical order
    Partitions {
        #[arg(long)]
        k: usize,
        /// Omit the single-block partition
        #[arg(long)]
        proper: bool,
    },
    /// Tabulate every constant entering the a-priori bound
    Bounds(RunArgs),
    /// Simulate the derivative system and write the paths
    Simulate {
        #[command(flatten)]
        args: RunArgs,
        /// Also write every spectral coefficient
        #[arg(long)]
        coefficients: bool,
    },
    /// Finite-difference Fréchet convergence check
    FdCheck(RunArgs),
    /// Weighted regularity ratios over eigenmode probes
    Regularity(RunArgs),
    /// Lipschitz ratio in the initial value
    Lipschitz(RunArgs),
    /// Recursive a-priori bound
    Bound(RunArgs),
    /// bound, fd-check, regularity and lipschitz together
    Report(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Partitions { .. } => "partitions",
            Command::Bounds(_) => "bounds",
            Command::Simulate { .. } => "simulate",
            Command::FdCheck(_) => "fd-check",
            Command::Regularity(_) => "regularity",
            Command::Lipschitz(_) => "lipschitz",
            Command::Bound(_) => "bound",
            Command::Report(_) => "report",
        }
    }
}

/// Loads the configuration, applying the seed override.
pub fn load(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = parse_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Runs one subcommand. Returns whether every summary criterion passed.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<bool> {
    let name = command.name();
    let (args, run): (&RunArgs, fn(&ExperimentConfig) -> Result<Report>) = match command {
        Command::Partitions { k, proper } => {
            let list = if *proper {
                enumerate_proper_partitions(*k)?
            } else {
                enumerate_partitions(*k)?
            };
            for p in &list {
                writeln!(stdout, "{p}")?;
            }
            writeln!(stdout, "count={}", list.len())?;
            return Ok(true);
        }
        Command::Simulate { args, coefficients } => {
            let cfg = load(args)?;
            let report = run::simulate(&cfg, &args.out, *coefficients)?;
            return finish(name, args, &cfg, &report, stdout);
        }
        Command::Bounds(args) => (args, run::bounds),
        Command::FdCheck(args) => (args, run::fd_check),
        Command::Regularity(args) => (args, run::regularity),
        Command::Lipschitz(args) => (args, run::lipschitz),
        Command::Bound(args) => (args, run::bound),
        Command::Report(args) => (args, run::full_report),
    };
    let cfg = load(args)?;
    let report = run(&cfg)?;
    finish(name, args, &cfg, &report, stdout)
}

fn finish(name: &str, args: &RunArgs, cfg: &ExperimentConfig, report: &Report, stdout: &mut dyn Write) -> Result<bool> {
    output::write_outputs(&args.out, name, &cfg.source, cfg.seed, report)?;
    for row in &report.summary {
        writeln!(stdout, "{row}")?;
    }
    Ok(report.passed())
}

/// Worker cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}
