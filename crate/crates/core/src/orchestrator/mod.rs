//! End-to-end scans: build each scenario, dispatch it once over the
//! horizon, then simulate every sensitivity case in every hour.
//!
//! Simulations of one checkpoint run in parallel on a dedicated pool; each
//! is a pure function of its inputs and results are collected in task
//! order, so the store is identical for any worker count.

mod config;
mod scan;
mod store;

pub use config::{DeviceOption, DeviceSpec, GridSpec, InputSpec, LoadParams, ScanConfig, TraceSource};
pub use scan::{planned_cases, replay_case, resume, resume_with, run_scan, run_scan_with, CaseReplay, ScanControl};
pub use store::{Manifest, ResultStore, SkippedScenario};

use crate::dispatch::DispatchError;
use crate::dynamics::DynamicsError;
use crate::metrics::MetricsError;
use crate::scenario::ScenarioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("store was written with config {found}, this config hashes to {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error("result store: {0}")]
    Store(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("{label}, hour {hour}: {source}")]
    Dynamics { label: String, hour: usize, source: DynamicsError },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
