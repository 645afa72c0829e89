//! Scenario inputs: generation portfolio, hourly traces, penetration-targeted
//! scenario construction and the prosumer net-demand transform.

mod build;
mod portfolio;
mod prosumer;
pub mod synth;
mod traces;

pub use build::{build_scenario, potential_ns_share, ReplacementRule, ScenarioRules};
pub use portfolio::{mainland_portfolio, GeneratorSpec, Tech, TechDefaults};
pub use prosumer::{apply_prosumers, simulate_prosumer_region, ProsumerConfig, ProsumerLedger};
pub use traces::{load_traces, parse_traces, HourlyTraceSet, RegionTrace, TRACE_HEADER};

use crate::dispatch::UcHour;
use crate::region::RegionId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("row {row}: region {region} has no sample for hour {hour}")]
    MissingRegion { row: usize, region: RegionId, hour: usize },
    #[error("row {row}: region {region} expected hour {expected}, found {found}")]
    NonContiguousHours { row: usize, region: RegionId, expected: usize, found: usize },
    #[error("row {row} (hour {hour}): {column} = {value} is out of range")]
    ValueOutOfRange { row: usize, hour: usize, column: &'static str, value: f64 },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("trace file is empty")]
    EmptyTraces,
    #[error("NSAP target {target} is unreachable: {reason}")]
    TargetUnreachable { target: f64, reason: String },
    #[error("invalid NSAP target {0}")]
    InvalidTarget(f64),
    #[error("prosumer configuration has no entry for region {0}")]
    ConfigMissingRegion(RegionId),
    #[error("generator {id}: {reason}")]
    InvalidGenerator { id: String, reason: String },
    #[error("empty dispatch horizon")]
    EmptyHorizon,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A portfolio plus hourly traces targeting one annual NS-RES penetration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    /// Label of the form `NSxx`.
    pub id: String,
    pub portfolio: Vec<GeneratorSpec>,
    pub traces: HourlyTraceSet,
    pub reserve_fraction: f64,
    pub target_nsap: f64,
}

impl Scenario {
    /// The base scenario: the supplied portfolio at its nominal penetration.
    pub fn base(portfolio: Vec<GeneratorSpec>, traces: HourlyTraceSet, target_nsap: f64) -> Self {
        Scenario {
            id: nsap_label(target_nsap),
            portfolio,
            traces,
            reserve_fraction: 0.10,
            target_nsap,
        }
    }

    pub fn regions(&self) -> &[RegionId] {
        self.traces.regions()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for g in &self.portfolio {
            g.validate()?;
        }
        if !(self.reserve_fraction >= 0.0) {
            return Err(ScenarioError::InvalidTarget(self.reserve_fraction));
        }
        Ok(())
    }
}

/// `0.4 -> "NS40"`.
pub fn nsap_label(target: f64) -> String {
    format!("NS{:02}", (target * 100.0).round() as u32)
}

/// `"NS40" -> 0.4`.
pub fn parse_nsap_label(label: &str) -> Option<f64> {
    let digits = label.strip_prefix("NS")?;
    if digits.len() != 2 || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse::<u32>().ok().map(|v| v as f64 / 100.0)
}

/// Realised annual NS-RES penetration: dispatched NS-RES energy over total
/// dispatched energy across the horizon.
pub fn compute_nsap(portfolio: &[GeneratorSpec], uc: &[UcHour]) -> Result<f64, ScenarioError> {
    let mut ns = 0.0;
    let mut total = 0.0;
    for hour in uc {
        for (g, u) in portfolio.iter().zip(&hour.units) {
            if g.tech.is_non_synchronous() {
                ns += u.p;
            }
            total += u.p;
        }
    }
    if uc.is_empty() || total <= 0.0 {
        return Err(ScenarioError::EmptyHorizon);
    }
    Ok((ns / total).clamp(0.0, 1.0))
}
