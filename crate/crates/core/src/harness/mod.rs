//! Experiment configs, presets, runs and CSV output.

mod config;
mod data;
mod presets;
mod run;

use thiserror::Error;

use crate::error::WrError;

pub use config::{load_config, BoundChoice, DataSpec, ExperimentSpec, ModelKind, PartitionSpec};
pub use data::{make_guesses, DataId, GuessPreset, GuessReading, DATA_IDS};
pub use presets::{find_preset, preset_spec, presets, Preset};
pub use run::{
    bound_kind_for, build_problem, compare_methods, interface_error, prepare, run_experiment,
    run_method, write_outputs, CompareRow, CompareTable, ErrorReport, ExperimentResult, Prepared,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid experiment: {0}")]
    Validation(String),
    #[error("inconsistent specs: {0}")]
    InconsistentSpecs(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Solver(#[from] WrError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
