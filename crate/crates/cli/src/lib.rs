//! Configuration, persistence and subcommand logic behind the `nehari`
//! binary.

pub mod commands;
pub mod config;
pub mod io;

pub use config::{parse_config, ConfigError, RunConfig};
