//! Spec-driven experiment runner behind the `photonic-ising` binary.
//!
//! A spec is a TOML document:
//!
//! ```toml
//! kind = "ising-memory"
//! seed = 7
//! workers = 4          # optional
//! output = "out.csv"   # optional
//!
//! [parameters]
//! M = 5
//! beta = 0.6
//! n_traj = 1000
//! ```
//!
//! The README lists every kind with its keys and defaults.

mod run;
mod spec;
mod table;

pub use run::{
    default_workers, execute, execute_sweep, meta_path, run, sweep, write_outputs, Format, RunMeta, RunResult,
    SCHEMA_VERSION, WORKERS_ENV,
};
pub use spec::{
    parse_spec, parse_spec_with, CavitySteadyParams, ExperimentSpec, GapScanParams, IsingMemoryParams, Kind,
    MeanfieldPhaseParams, OracleCheckParams, Overrides, Params, ToomDemoParams, ToyFidelityParams,
};
pub use table::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid spec:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Module(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Module(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
