//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "omcav",
    version,
    about = "Two-port optomechanical cavity: probe response, perfect absorption, time-domain runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the normalized response observables over the probe detuning.
    Sweep(CommonArgs),
    /// Report the perfect-absorption conditions and their verified residuals.
    Ieit(CommonArgs),
    /// List the self-consistent pump operating points.
    Steady(CommonArgs),
    /// Integrate the mean-value equations and write the trajectory.
    Evolve(EvolveArgs),
    /// Drive to steady oscillation, then raise the cavity decay and record
    /// the energy release.
    Qswitch(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,

    /// Override the output format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Override the output path ("-" for stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,

    /// Override a config field by dotted path, e.g. --set sweep.points=4001.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Which equations to integrate.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rwa,
    Full,
}
