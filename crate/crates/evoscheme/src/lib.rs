//! Command-line front end and file formats for `evoscheme-core`.
//!
//! Evolution runs, audits, convergence studies and sensitivity studies
//! are available both as library calls ([`evolve`], [`commands`]) and
//! through the `evoscheme` binary ([`cli`]).

#![warn(missing_docs)]

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod evolve;
pub mod files;
pub mod output;

pub use error::{CliError, Result};
