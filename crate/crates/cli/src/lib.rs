//! Command-line front end for the fractional SICA model: config ingestion and the
//! `simulate`, `analyze` and `sweep` subcommands.

pub mod commands;
pub mod config;
pub mod format;

pub use commands::{
    run_analyze, run_simulate, run_sweep, time_to_epsilon, CliError, SweepOutcome, SweepRow,
};
pub use config::{ConfigError, Mode, RunConfig};
