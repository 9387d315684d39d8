//! Scenario runner for the RIS respiration sensing simulator.
//!
//! A scenario file describes the radio, the surface, the persons and the
//! receiver settings. [`run_experiment`] turns it into per-person rate
//! estimates and measurements; [`export_results`] writes CSV records, plots
//! and a checksummed manifest.

pub mod error;
pub mod experiment;
pub mod export;
pub mod presets;
pub mod scenario;

pub use error::{HarnessError, Stage};
pub use experiment::{run_experiment, ManifestEntry, Measurement, Record, RunReport, TargetReport};
pub use export::export_results;
pub use scenario::{load_scenario, Scenario};
