//! Benchmark harness for spectral structural attacks: dataset loading,
//! synthetic graphs, experiment sweeps and report emitters.

pub mod experiment;
pub mod io;
pub mod report;
pub mod spectra;
pub mod synthetic;

pub use experiment::{run_experiment, AttackKind, ExperimentSpec, Report, Stage};
