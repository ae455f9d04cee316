//! Scenario configuration, the closed control loop, telemetry and metrics.

pub mod config;
pub mod controller;
pub mod metrics;
pub mod run;
pub mod telemetry;

use thiserror::Error;

use crate::simulator::SimError;

pub use config::{load_config, parse_scenario, GaitMode, Profile, Scenario};
pub use controller::{ControlOutput, Controller};
pub use metrics::{compute_metrics, compute_metrics_with, MetricsOptions, MetricsReport};
pub use run::{run_scenario, simulate, write_plan, RunOutcome};
pub use telemetry::{read_csv, write_csv, Telemetry, TelemetryHeader, TelemetryRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("simulation diverged at tick {tick}: {source}")]
    Divergence { tick: u64, source: SimError },
    #[error("telemetry: {0}")]
    Telemetry(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
