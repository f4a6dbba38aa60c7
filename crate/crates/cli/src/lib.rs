//! Configuration parsing and subcommands of the `kvtherm` binary.

pub mod commands;
pub mod config;

pub use commands::{execute, Command, Options, RunManifest};
pub use config::{parse_config, parse_config_str, Config, ConfigError};
