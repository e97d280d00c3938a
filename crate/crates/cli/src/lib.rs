//! Batch runner for learner-versus-learner comparisons over drift streams.

pub mod config;
pub mod presets;
pub mod runner;

pub use config::{ExperimentConfig, LearnerKind, LearnerSpec};
pub use presets::{preset, PRESET_NAMES};
pub use runner::{run_experiment, run_grid, write_outputs, ExperimentOutcome, RunRecord};

use std::path::{Path, PathBuf};
use streamtree::eval::EvalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Config { field: String, message: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unsupported generator {0}")]
    OutOfScope(String),
    #[error("run failed: {0}")]
    Eval(EvalError),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.to_string(), message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OutOfScope(_) => 3,
            CliError::Eval(_) => 1,
            _ => 2,
        }
    }
}
