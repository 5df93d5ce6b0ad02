//! Command-line front end: JSON configuration, subcommands and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

pub use commands::{gain_record, run, Cli, Command, Outcome};
pub use config::{
    ginzburg_landau_config, load_config, parse_config, reaction_diffusion_config, Config,
};
pub use csv::{read_trajectory_csv, write_trajectory_csv};
pub use error::CliError;
