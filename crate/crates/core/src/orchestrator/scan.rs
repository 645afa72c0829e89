use super::store::{ResultStore, SkippedScenario};
use super::{ScanConfig, ScanError};
use crate::contingency::{
    case_label, enumerate_cases, fixed_cc_for_hour, identify_regional_cc, parse_label, CcKind, ContingencyCase,
    SensitivityCase,
};
use crate::dispatch::{solve_uc, write_region_csv, DispatchError, UcHour};
use crate::dynamics::{build_multi_area_model, simulate, FrequencyTrace, LoadKind, PlacedDevice};
use crate::metrics::{evaluate, flat_metrics, nsip, ScanRecord};
use crate::region::RegionId;
use crate::scenario::Scenario;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Test and tooling hook: stop after a number of checkpoints, as if killed.
#[derive(Debug, Clone, Default)]
pub struct ScanControl {
    pub max_checkpoints: Option<usize>,
}

/// The configured sensitivity cases, in grid order.
pub fn planned_cases(cfg: &ScanConfig) -> Vec<SensitivityCase> {
    let meters = cfg.grid.meters.as_ref();
    let meter_all = cfg.grid.meter_all || meters.is_some();
    let regions = if meter_all { cfg.inputs.network.regions.clone() } else { cfg.locations() };
    enumerate_cases(&cfg.scenarios, &regions, meter_all)
        .into_iter()
        .filter(|c| cfg.grid.load_models.contains(&c.load_model) && cfg.grid.contingencies.contains(&c.contingency_kind))
        .filter(|c| cfg.locations().contains(&c.location))
        .filter(|c| meters.is_none_or(|m| m.contains(&c.meter)))
        .collect()
}

/// One case re-run in isolation: the dispatch hour, the transient (absent
/// when nothing trips) and the record a scan would store for it.
#[derive(Debug, Clone)]
pub struct CaseReplay {
    pub case: SensitivityCase,
    pub uc: UcHour,
    pub contingency: Option<ContingencyCase>,
    pub trace: Option<FrequencyTrace>,
    pub record: ScanRecord,
}

/// Re-runs one `(label, hour)` of a scan under `cfg`. The scenario is
/// dispatched over the configured horizon so commitment matches the scan.
pub fn replay_case(cfg: &ScanConfig, label: &str, hour: usize) -> Result<CaseReplay, ScanError> {
    let case = parse_label(label).map_err(|e| ScanError::Config(e.to_string()))?;
    for r in [&case.location, &case.meter] {
        if cfg.inputs.network.region_index(r).is_none() {
            return Err(ScanError::Config(format!("region {r} is not in the network")));
        }
    }
    let base = cfg.base_scenario()?;
    let (start, end) = cfg.uc.horizon.unwrap_or((0, base.traces.hours()));
    if !(start..end).contains(&hour) {
        return Err(ScanError::Config(format!("hour {hour} is outside the horizon {start}..{end}")));
    }
    let scenario = cfg.scenario(&base, &case.scenario)?;
    let uc = solve_uc(&scenario, &cfg.inputs.network, &cfg.uc)?;
    let h = &uc[hour - start];
    let group = Group { load: case.load_model, kind: case.contingency_kind, location: case.location.clone() };
    let member = (label.to_string(), case.meter.clone());
    let task = Task { group: &group, members: vec![&member], hour };
    let (mut records, contingency, trace) = simulate_task(cfg, &scenario, h, &cfg.devices.roster(&cfg.inputs.network), &task)?;
    Ok(CaseReplay { case, uc: h.clone(), contingency, trace, record: records.remove(0) })
}

/// Runs a fresh scan into `cfg.output`, discarding earlier results there.
pub fn run_scan(cfg: &ScanConfig) -> Result<ResultStore, ScanError> {
    run_scan_with(cfg, &ScanControl::default())
}

pub fn run_scan_with(cfg: &ScanConfig, control: &ScanControl) -> Result<ResultStore, ScanError> {
    cfg.validate()?;
    let store = ResultStore::create(&cfg.output, &cfg.hash()?)?;
    drive(cfg, store, control)
}

/// Completes the keys `store` is missing.
pub fn resume(cfg: &ScanConfig, store: ResultStore) -> Result<ResultStore, ScanError> {
    resume_with(cfg, store, &ScanControl::default())
}

pub fn resume_with(cfg: &ScanConfig, store: ResultStore, control: &ScanControl) -> Result<ResultStore, ScanError> {
    cfg.validate()?;
    let expected = cfg.hash()?;
    if store.config_hash() != expected {
        return Err(ScanError::ConfigMismatch { expected, found: store.config_hash().to_string() });
    }
    drive(cfg, store, control)
}

/// Simulations sharing dispatch hour, load model and contingency; one
/// record per meter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Group {
    load: LoadKind,
    kind: CcKind,
    location: RegionId,
}

struct Task<'a> {
    group: &'a Group,
    members: Vec<&'a (String, RegionId)>,
    hour: usize,
}

fn drive(cfg: &ScanConfig, mut store: ResultStore, control: &ScanControl) -> Result<ResultStore, ScanError> {
    let base = cfg.base_scenario()?;
    let net = &cfg.inputs.network;
    let devices = cfg.devices.roster(net);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ScanError::Config(format!("worker pool: {e}")))?;
    let (start, end) = cfg.uc.horizon.unwrap_or((0, base.traces.hours()));
    let cases = planned_cases(cfg);
    let mut checkpoints = 0usize;

    for label in &cfg.scenarios {
        if store.skipped().iter().any(|s| &s.scenario == label) {
            continue;
        }
        let mut groups: BTreeMap<Group, Vec<(String, RegionId)>> = BTreeMap::new();
        for c in cases.iter().filter(|c| &c.scenario == label) {
            let g = Group { load: c.load_model, kind: c.contingency_kind, location: c.location.clone() };
            groups.entry(g).or_default().push((case_label(c), c.meter.clone()));
        }
        let missing = |h: usize| groups.values().flatten().any(|(l, _)| !store.is_done(l, h));
        if !(start..end).any(missing) {
            continue;
        }

        let scenario = match cfg.scenario(&base, label) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("{label}: skipped, {e}");
                store.record_skip(SkippedScenario { scenario: label.clone(), reason: e.to_string(), infeasible: false })?;
                continue;
            }
        };
        log::info!("{label}: dispatching hours {start}..{end}");
        let uc = match solve_uc(&scenario, net, &cfg.uc) {
            Ok(uc) => uc,
            Err(e @ DispatchError::Infeasible { .. }) => {
                log::warn!("{label}: skipped, {e}");
                store.record_skip(SkippedScenario { scenario: label.clone(), reason: e.to_string(), infeasible: true })?;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let dispatch_dir = store.dir().join("dispatch");
        std::fs::create_dir_all(&dispatch_dir)?;
        let f = std::fs::File::create(dispatch_dir.join(format!("{label}_regions.csv")))?;
        write_region_csv(std::io::BufWriter::new(f), &uc, net)?;

        for chunk in uc.chunks(cfg.checkpoint_every) {
            let mut tasks = Vec::new();
            for (g, members) in &groups {
                for h in chunk {
                    let todo: Vec<&(String, RegionId)> = members.iter().filter(|(l, _)| !store.is_done(l, h.hour)).collect();
                    if !todo.is_empty() {
                        tasks.push(Task { group: g, members: todo, hour: h.hour });
                    }
                }
            }
            if tasks.is_empty() {
                continue;
            }
            let results: Vec<Result<Vec<ScanRecord>, ScanError>> = pool.install(|| {
                tasks.par_iter().map(|t| run_task(cfg, &scenario, &uc[t.hour - start], &devices, t)).collect()
            });
            let mut records = Vec::new();
            for r in results {
                records.extend(r?);
            }
            let done: Vec<(String, usize)> =
                tasks.iter().flat_map(|t| t.members.iter().map(move |(l, _)| (l.clone(), t.hour))).collect();
            store.commit(&records, &done)?;
            checkpoints += 1;
            log::info!(
                "{label}: checkpoint {checkpoints}, through hour {}, {} keys stored",
                chunk.last().map_or(0, |h| h.hour),
                store.completed_count()
            );
            if control.max_checkpoints.is_some_and(|m| checkpoints >= m) {
                return Ok(store);
            }
        }
    }
    store.finish()?;
    Ok(store)
}

fn run_task(
    cfg: &ScanConfig,
    scenario: &Scenario,
    uc: &UcHour,
    devices: &[PlacedDevice],
    task: &Task,
) -> Result<Vec<ScanRecord>, ScanError> {
    simulate_task(cfg, scenario, uc, devices, task).map(|(records, _, _)| records)
}

type TaskOutput = (Vec<ScanRecord>, Option<ContingencyCase>, Option<FrequencyTrace>);

fn simulate_task(
    cfg: &ScanConfig,
    scenario: &Scenario,
    uc: &UcHour,
    devices: &[PlacedDevice],
    task: &Task,
) -> Result<TaskOutput, ScanError> {
    let net = &cfg.inputs.network;
    let f0 = cfg.uc.f0;
    let g = task.group;
    let dyn_err = |source| ScanError::Dynamics { label: task.members[0].0.clone(), hour: task.hour, source };
    let model = build_multi_area_model(uc, &scenario.portfolio, net, &cfg.load.model(g.load), devices, f0)
        .map_err(dyn_err)?;
    let cc: Option<ContingencyCase> = match g.kind {
        CcKind::Variable => identify_regional_cc(uc, &scenario.portfolio, &g.location).ok(),
        CcKind::Fixed => Some(fixed_cc_for_hour(&g.location, uc, &scenario.portfolio, &cfg.fixed_cc)),
    };
    let p_cc = cc.as_ref().map_or(0.0, |c| c.size);
    let trace = match &cc {
        Some(c) if c.size > 0.0 => Some(simulate(&model, c, &cfg.sim).map_err(dyn_err)?),
        _ => None,
    };
    let penetration = nsip(uc, &scenario.portfolio)?;
    let i_sys = model.total_inertia();
    let mut out = Vec::with_capacity(task.members.len());
    for (label, meter) in &task.members {
        let r = model.region_index(meter).ok_or_else(|| ScanError::Config(format!("meter {meter} not in network")))?;
        let metrics = match &trace {
            Some(t) => evaluate(t, r, &cfg.thresholds)?,
            None => flat_metrics(f0, cfg.sim.event_time, &cfg.thresholds),
        };
        out.push(ScanRecord {
            case_label: label.clone(),
            hour: task.hour,
            meter: meter.clone(),
            i_sys,
            i_region: model.regions[r].inertia,
            p_cc,
            nsip: penetration,
            metrics,
        });
    }
    Ok((out, cc, trace))
}
