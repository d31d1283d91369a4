//! Configuration, run orchestration and serialization for the kinetic solver.

pub mod config;
pub mod run;
pub mod snapshot;
pub mod validate;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use run::{run, write_spectrum, RunSummary};
