//! Experiment runner for the semi-federated learning simulator.
//!
//! Loads a run configuration, builds the device population, drives the
//! rounds, and persists `reports.csv`, `ledger.csv` and the resolved
//! `config.json`. The simulation itself lives in [`semifl_core`].

pub mod compare;
pub mod config;
pub mod io;
pub mod parallel;
pub mod runner;

pub use compare::{compare_runs, CompareError, Comparison, RunSeries};
pub use config::{ConfigError, DatasetSpec, RunConfig};
pub use parallel::RayonExecutor;
pub use runner::{run_experiment, simulate, RunError, RunOutput};
pub use semifl_core;
