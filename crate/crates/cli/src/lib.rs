//! Driver for the `ibvp` binary: configuration, run orchestration and
//! deterministic artifact output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_str, parse_config_with, Mode, Overrides, RunConfig};
pub use error::{CliError, CliResult};
pub use run::{run, Summary};
