//! Command-line pipelines over the `stopline` library: scene generation,
//! training targets, line extraction, banded evaluation and reporting.

pub mod cmd;
pub mod frames;
mod io;
pub mod manifest;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "stopline", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args, Serialize)]
#[command(next_help_heading = "Global options")]
pub struct GlobalArgs {
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl GlobalArgs {
    pub fn out_dir(&self) -> Result<PathBuf> {
        let out = self
            .out
            .clone()
            .context("--out is required for this subcommand")?;
        std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(out)
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Write synthetic intersection scenes with ground truth.
    Gen(cmd::gen::GenArgs),
    /// Compute distance and direction targets from masks.
    Targets(cmd::targets::TargetsArgs),
    /// Extract sparse stop lines from masks or grid maps.
    Extract(cmd::extract::ExtractArgs),
    /// Associate predictions with ground truth and report per band.
    Eval(cmd::eval::EvalArgs),
    /// Camera range table and required detection distance.
    Geometry(cmd::geometry::GeometryArgs),
    /// Merge several report.json files into one comparison CSV.
    Report(cmd::report::ReportArgs),
}

/// Runs one parsed invocation on its own worker pool.
pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
        .context("starting worker pool")?;
    let g = &cli.global;
    pool.install(|| match &cli.command {
        Command::Gen(a) => cmd::gen::run(g, a),
        Command::Targets(a) => cmd::targets::run(g, a),
        Command::Extract(a) => cmd::extract::run(g, a),
        Command::Eval(a) => cmd::eval::run(g, a),
        Command::Geometry(a) => cmd::geometry::run(g, a),
        Command::Report(a) => cmd::report::run(g, a),
    })
}

/// Parses `args` (without the program name) and runs them.
pub fn run_args<I, S>(args: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("stopline"))
        .chain(args.into_iter().map(Into::into));
    run(&Cli::try_parse_from(argv)?)
}
