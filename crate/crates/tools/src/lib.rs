//! File formats, run configuration and report assembly around `qsunif`.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use pipeline::{run, Command, RunReport};
