//! Batch front end for the Otto-cycle simulator: JSON configs in, CSV out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{equilibrium_curve, run_command, Artifacts, Command, Figure};
pub use config::{load_config, parse_config, RunConfig};
pub use error::CliError;
