//! Hourly unit commitment and economic dispatch with spinning reserve,
//! flexibility, transfer-limit and regional inertia constraints.
//!
//! [`solve_uc`] is a heuristic: a constructive hourly commitment, a forward
//! ramp-aware repair sweep and a local search over unit on/off blocks, with
//! every candidate priced by an exact per-hour economic dispatch (a min-cost
//! flow over the region graph). Instances whose commitment space is tiny are
//! enumerated exhaustively instead. Feasibility is audited independently by
//! [`validate_uc`].

mod commit;
mod ed;
mod export;
mod flows;
mod lp;
mod model;
mod validate;

pub use commit::solve_uc;
pub use export::{write_region_csv, write_unit_csv, REGION_CSV_HEADER, UNIT_CSV_HEADER};
pub use flows::{dc_flows_from_injections, dc_tie_flows, FlowLimitViolation, TieFlows};
pub use validate::{validate_uc, Violation, ViolationReport};

use crate::region::RegionId;
use crate::scenario::{GeneratorSpec, ScenarioError};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Inter-regional transfer path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: RegionId,
    pub to: RegionId,
    /// MW, both directions.
    pub limit: f64,
    /// Synchronising coefficient, MW/rad; used by the dynamics and as the
    /// susceptance proxy of the DC flow.
    pub sync_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub regions: Vec<RegionId>,
    pub lines: Vec<Line>,
}

impl Network {
    /// The simplified mainland NEM: a radial chain QLD–NSW–VIC–SA.
    pub fn nem() -> Self {
        let line = |a: &str, b: &str, limit: f64| Line { from: a.into(), to: b.into(), limit, sync_coeff: 500.0 };
        Network {
            regions: crate::region::nem_regions(),
            lines: vec![line("QLD", "NSW", 2_500.0), line("NSW", "VIC", 2_500.0), line("VIC", "SA", 1_200.0)],
        }
    }

    /// One region, no lines.
    pub fn single(region: impl Into<RegionId>) -> Self {
        Network { regions: vec![region.into()], lines: vec![] }
    }

    pub fn region_index(&self, r: &RegionId) -> Option<usize> {
        self.regions.iter().position(|x| x == r)
    }

    /// Endpoint indices of each line.
    pub fn line_ends(&self) -> Vec<(usize, usize)> {
        self.lines
            .iter()
            .map(|l| (self.region_index(&l.from).unwrap_or(usize::MAX), self.region_index(&l.to).unwrap_or(usize::MAX)))
            .collect()
    }

    pub fn is_radial(&self) -> bool {
        self.lines.len() + 1 == self.regions.len()
    }

    pub fn validate(&self) -> Result<(), DispatchError> {
        let bad = |m: String| Err(DispatchError::InvalidNetwork(m));
        if self.regions.is_empty() {
            return bad("no regions".into());
        }
        for (i, r) in self.regions.iter().enumerate() {
            if self.regions[..i].contains(r) {
                return bad(format!("duplicate region {r}"));
            }
        }
        for l in &self.lines {
            if self.region_index(&l.from).is_none() || self.region_index(&l.to).is_none() {
                return bad(format!("line {}–{} references an unknown region", l.from, l.to));
            }
            if l.from == l.to {
                return bad(format!("line {}–{} is a self loop", l.from, l.to));
            }
            if !(l.limit > 0.0) || !(l.sync_coeff > 0.0) {
                return bad(format!("line {}–{} needs positive limit and sync_coeff", l.from, l.to));
            }
        }
        // Connectivity.
        let n = self.regions.len();
        let ends = self.line_ends();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &(x, y) in &ends {
                for (p, q) in [(x, y), (y, x)] {
                    if p == a && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return bad(format!("region {} is not connected", self.regions[i]));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InertiaConstraint {
    #[default]
    Off,
    /// Every region must hold enough synchronous inertia that losing its
    /// largest dispatched synchronous unit stays within the RoCoF limit.
    Regional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UcOptions {
    /// Overrides the scenario's reserve fraction when set.
    pub reserve_fraction: Option<f64>,
    pub inertia_constraint: InertiaConstraint,
    pub f0: f64,
    /// Magnitude, Hz/s.
    pub rocof_crit: f64,
    /// Hour range `[start, end)`; `None` is the whole trace horizon.
    pub horizon: Option<(usize, usize)>,
    /// Cap on local-search move evaluations.
    pub search_budget: usize,
    /// Commitment spaces of at most 2^bits schedules are enumerated.
    pub exact_max_bits: u32,
}

impl Default for UcOptions {
    fn default() -> Self {
        UcOptions {
            reserve_fraction: None,
            inertia_constraint: InertiaConstraint::Off,
            f0: 50.0,
            rocof_crit: 0.5,
            horizon: None,
            search_budget: 20_000,
            exact_max_bits: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UnitState {
    pub on: bool,
    /// MW
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionState {
    /// Σ (capacity − p) over committed energy-producing synchronous units, MW.
    pub reserve: f64,
    /// MW·s
    pub inertia: f64,
    /// MW
    pub net_demand: f64,
}

/// Why a cheaper unit is not carrying more load in an hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BindingReason {
    /// Offline and still inside its minimum down time.
    MinDown,
    /// Offline because starting it (start-up, no-load and min-up
    /// commitments) would cost more than it saves.
    CommitmentCost,
    Ramp,
    Inertia,
    LineLimit,
    Reserve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingTag {
    pub gen_id: String,
    pub reason: BindingReason,
}

/// Commitment and dispatch of one hour. Unit states follow portfolio
/// order, region states follow network region order and tie flows follow
/// network line order (positive from `from` to `to`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcHour {
    pub hour: usize,
    pub units: Vec<UnitState>,
    pub regions: Vec<RegionState>,
    pub tie_flows: Vec<f64>,
    pub curtailed_ns: Vec<f64>,
    pub binding: Vec<BindingTag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// Demand cannot be served (capacity or transfer limits).
    Balance,
    /// Must-run output exceeds what can be absorbed.
    Overgeneration,
    Reserve,
    Inertia,
    Ramp,
    MinUp,
    MinDown,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintKind::Balance => "balance",
            ConstraintKind::Overgeneration => "overgeneration",
            ConstraintKind::Reserve => "reserve",
            ConstraintKind::Inertia => "inertia",
            ConstraintKind::Ramp => "ramp",
            ConstraintKind::MinUp => "min-up",
            ConstraintKind::MinDown => "min-down",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("hour {hour}: {constraint} constraint cannot be satisfied in {region}")]
    Infeasible { hour: usize, constraint: ConstraintKind, region: RegionId },
    #[error("all inputs must be positive")]
    NonPositiveInput,
    #[error("injections do not sum to zero (imbalance {imbalance} MW)")]
    UnbalancedSystem { imbalance: f64 },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("horizon {start}..{end} is outside the {hours}-hour traces")]
    HorizonOutOfRange { start: usize, end: usize, hours: usize },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Σ H·S over committed synchronous machines, MW·s.
pub fn system_inertia(uc: &UcHour, portfolio: &[GeneratorSpec]) -> f64 {
    portfolio.iter().zip(&uc.units).filter(|(_, u)| u.on).map(|(g, _)| g.stored_energy()).sum()
}

/// As [`system_inertia`], restricted to one region.
pub fn regional_inertia(uc: &UcHour, portfolio: &[GeneratorSpec], region: &RegionId) -> f64 {
    portfolio
        .iter()
        .zip(&uc.units)
        .filter(|(g, u)| u.on && &g.region == region)
        .map(|(g, _)| g.stored_energy())
        .sum()
}

/// Synchronous inertia that keeps the initial RoCoF after losing `p_cc`
/// within `rocof_crit`: f0·p_cc / (2·rocof_crit).
pub fn min_inertia_requirement(p_cc: f64, f0: f64, rocof_crit: f64) -> Result<f64, DispatchError> {
    if !(p_cc > 0.0 && f0 > 0.0 && rocof_crit > 0.0) {
        return Err(DispatchError::NonPositiveInput);
    }
    Ok(f0 * p_cc / (2.0 * rocof_crit))
}

/// Largest unit output the inertia constraint allows with `inertia` MW·s.
pub(crate) fn max_cc_for_inertia(inertia: f64, f0: f64, rocof_crit: f64) -> f64 {
    2.0 * rocof_crit * inertia / f0
}
