//! Replay harness for the dyndist engine: graph and stream parsing, one
//! oracle per `--mode`, CSV reporting and optional cross-checking against
//! exact Dijkstra distances.

pub mod parse;
pub mod run;

pub use run::{main_with, run, Config, Mode, Report, Row};

/// Every variant maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{col}: {msg}")]
    Parse { path: String, line: usize, col: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] dyndist::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
