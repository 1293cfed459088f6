//! Experiment registry, configuration and output.

pub mod config;
pub mod output;
pub mod scenarios;
pub mod units;

pub use config::{ExperimentConfig, Format};
pub use output::{write_outputs, ScenarioResult, Table};
pub use scenarios::{run_scenario, scenario_names, SCENARIOS};
pub use units::{lab_to_dimensionless, LabUnits};
