//! Time-series frequency stability scanning for power systems with high
//! shares of converter-interfaced generation.
//!
//! - [`scenario`]: portfolios, hourly traces, penetration targets, prosumers
//! - [`dispatch`]: hourly unit commitment with reserve and inertia limits
//! - [`contingency`]: credible contingencies and the case grid
//! - [`dynamics`]: multi-area frequency response after a contingency
//! - [`metrics`]: RoCoF, nadir, settling frequency, scan aggregation
//! - [`orchestrator`]: scans with checkpoints and a resumable result store

pub mod contingency;
pub mod dispatch;
pub mod dynamics;
pub mod metrics;
pub mod orchestrator;
pub mod region;
pub mod scenario;

pub use contingency::{
    case_label, enumerate_cases, fixed_cc, fixed_cc_for_hour, identify_regional_cc, identify_system_cc, parse_label,
    planned_runs, CcKind, ContingencyCase, ContingencyError, FixedCcConfig, SensitivityCase,
};
pub use dispatch::{
    dc_tie_flows, min_inertia_requirement, regional_inertia, solve_uc, system_inertia, validate_uc, DispatchError,
    InertiaConstraint, Network, UcHour, UcOptions, ViolationReport,
};
pub use dynamics::{
    build_multi_area_model, simulate, Device, DynModel, DynamicsError, FrequencyTrace, LoadKind, LoadModel,
    PlacedDevice, SimOptions,
};
pub use metrics::{
    aggregate_scan, critical_nsip_range, nsip, FrequencyMetrics, MetricsError, ScanRecord, ScanSummary, Thresholds,
};
pub use orchestrator::{resume, run_scan, ResultStore, ScanConfig, ScanError};
pub use region::RegionId;
pub use scenario::{
    apply_prosumers, build_scenario, compute_nsap, load_traces, GeneratorSpec, HourlyTraceSet, ProsumerConfig, Scenario,
    ScenarioError, Tech,
};
