//! Command-line front end: strict JSON configuration, dotted-path
//! overrides, deterministic CSV/JSON emission and the five subcommands
//! (sweep, ieit, steady, evolve, qswitch).

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use args::{Cli, Command, CommonArgs, FormatArg, ModeArg};
use config::{EvolveMode, Format, RunConfig};
use error::CliResult;

fn load(common: &CommonArgs) -> CliResult<RunConfig> {
    let mut cfg = config::load_config(&common.config, &common.set)?;
    if let Some(format) = common.format {
        cfg.output.format = match format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(out) = &common.out {
        cfg.output.path = Some(out.clone());
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sweep(common) => commands::cmd_sweep(&load(common)?),
        Command::Ieit(common) => commands::cmd_ieit(&load(common)?),
        Command::Steady(common) => commands::cmd_steady(&load(common)?),
        Command::Evolve(args) => {
            let cfg = load(&args.common)?;
            let mode = match args.mode {
                Some(ModeArg::Rwa) => EvolveMode::Rwa,
                Some(ModeArg::Full) => EvolveMode::Full,
                None => cfg.evolve.mode,
            };
            commands::cmd_evolve(&cfg, mode)
        }
        Command::Qswitch(common) => commands::cmd_qswitch(&load(common)?),
    }
}
