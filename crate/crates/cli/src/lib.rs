//! Batch simulation harness and command-line front end for `bootpivot-core`.

pub mod app;
pub mod config;
pub mod data;
pub mod error;
pub mod harness;
pub mod output;
pub mod schedule;

pub use error::{CliError, Result};
