//! File formats and the `pnet` command-line pipeline.
//!
//! - [`network_file`]: network and structure JSON documents;
//! - [`dataset_file`]: imprecise dataset CSV plus its JSON manifest;
//! - [`report`]: evaluation reports as key-value text and JSON;
//! - [`cli`]: the `sample`, `learn`, `score` and `evaluate` subcommands.

pub mod cli;
pub mod dataset_file;
pub mod error;
pub mod network_file;
pub mod report;

pub use error::{Error, Result};
