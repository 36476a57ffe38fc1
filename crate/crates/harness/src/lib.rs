//! Benchmark generation, batch experiments, agent adapters and scoring for
//! walk-based graph estimation.
//!
//! The `walkest` binary wraps these modules; everything it does is reachable
//! from here as well.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod agent;
pub mod benchmark;
pub mod config;
pub mod fetch;
pub mod pipeline;
pub mod runner;
pub mod score;

pub use agent::{parse_answer, Agent, AgentError, Answer};
pub use benchmark::{generate_benchmark, BenchmarkError, Cell, GraphEntry, GraphTruth, Manifest};
pub use config::{ConfigError, SizeClass, TaskSpec};
pub use fetch::{fetch_dataset, FetchError, FetchOptions};
pub use pipeline::Estimate;
pub use runner::{run_agent, run_task, ExperimentRecord, Status};
pub use score::{score, ScoreRow, ScoreTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Other(String),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
