//! Fixtures shared by the benchmarks.

use freqscan_core::contingency::{identify_regional_cc, ContingencyCase};
use freqscan_core::dispatch::{solve_uc, UcHour, UcOptions};
use freqscan_core::dynamics::{build_multi_area_model, DynModel, LoadKind, LoadModel};
use freqscan_core::orchestrator::{ScanConfig, TraceSource};
use freqscan_core::scenario::Scenario;

/// A scenario built on `hours` of synthetic traces.
pub fn scenario(label: &str, hours: usize) -> (ScanConfig, Scenario) {
    let mut cfg = ScanConfig::default();
    cfg.inputs.traces = TraceSource::Synthetic { hours, seed: 1 };
    let base = cfg.base_scenario().expect("base scenario");
    let s = cfg.scenario(&base, label).expect("scenario");
    (cfg, s)
}

/// The dynamic model and QLD variable contingency of one dispatched hour.
pub struct HourCase {
    pub uc: UcHour,
    pub model: DynModel,
    pub cc: ContingencyCase,
}

pub fn hour_case(label: &str, hours: usize, hour: usize) -> HourCase {
    let (cfg, s) = scenario(label, hours);
    let uc = solve_uc(&s, &cfg.inputs.network, &UcOptions::default()).expect("dispatch");
    let h = uc[hour].clone();
    let model = build_multi_area_model(&h, &s.portfolio, &cfg.inputs.network, &LoadModel::new(LoadKind::Dynamic), &[], 50.0)
        .expect("model");
    let cc = identify_regional_cc(&h, &s.portfolio, &"QLD".into()).expect("contingency");
    HourCase { uc: h, model, cc }
}
