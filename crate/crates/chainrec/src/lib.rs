//! Command-line front end for `chainrec-core`: TOML run configs, a worker
//! pool for parameter sweeps, and the files a run leaves behind (covering
//! CSV, recurrence raster, events and records as JSON).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod raster;

pub use config::RunConfig;
pub use error::{CliError, ConfigError};
