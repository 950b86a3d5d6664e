//! Command-line front end for `drawstring-core`: run configuration, profile
//! and report files, CSV tables, and the subcommands that produce them.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod presets;

pub use commands::{run, Outcome};
pub use config::{Command, Flags, PresetName, RunConfig};
pub use error::CliError;
