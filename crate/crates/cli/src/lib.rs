//! File-and-flag front-end: one JSON scenario per run, artifacts written to
//! `<out>/<run-name>/`.

pub mod config;
pub mod error;
mod run;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use run::{compare, run, Outcome, RunOptions};
