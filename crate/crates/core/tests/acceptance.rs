//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p freqscan-core --test acceptance` (release-grade opt level
//! via the test profile). Pass criterion ids (`AC4 AC5`) to run a subset and
//! `--strict` to exit non-zero when any criterion fails.

mod common;

use freqscan_core::contingency::{enumerate_cases, identify_regional_cc, identify_system_cc, planned_runs, CcKind, ContingencyCase};
use freqscan_core::dispatch::{
    min_inertia_requirement, solve_uc, system_inertia, validate_uc, InertiaConstraint, UcHour,
};
use freqscan_core::dynamics::{
    build_multi_area_model, simulate, Device, DynModel, GovernorFleet, InertiaEmulation, LoadKind,
    LoadModel, RegionDyn, SimOptions,
};
use freqscan_core::metrics::{evaluate, local_minima, min_rocof, Thresholds};
use freqscan_core::orchestrator::{run_scan, DeviceOption, DeviceSpec, ScanConfig, TraceSource};
use freqscan_core::region::nem_regions;
use freqscan_core::scenario::Scenario;
use freqscan_core::RegionId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

type Outcome = Result<String, String>;

const LABELS: [&str; 9] = ["NS10", "NS20", "NS30", "NS40", "NS50", "NS60", "NS70", "NS80", "NS90"];

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cc(region: &str, size: f64) -> ContingencyCase {
    ContingencyCase { region: region.into(), size, kind: CcKind::Variable, tripped_unit: None, inertia_removed: 0.0 }
}

fn single(inertia: f64, load: f64, lm: LoadModel) -> DynModel {
    DynModel { f0: 50.0, regions: vec![RegionDyn::bare("A", inertia, load, lm)], lines: vec![] }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let k = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[k]
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

// Analytic oracle.
fn ac1() -> Outcome {
    let start = Instant::now();
    let opts = SimOptions::default();
    let t = simulate(&single(30_000.0, 0.0, LoadModel::rigid()), &cc("A", 600.0), &opts).map_err(|e| e.to_string())?;
    let ramp_err = (0..t.samples())
        .map(|k| (t.f[0][k] - (50.0 - 0.5 * (t.time(k) - 1.0).max(0.0))).abs())
        .fold(0.0, f64::max);
    check(ramp_err <= 1e-6, || format!("undamped ramp error {ramp_err:e} Hz"))?;

    let lm = LoadModel::new(LoadKind::Static);
    let (i, load, p) = (30_000.0, 12_000.0, 600.0);
    let d = lm.effective_damping(load, 50.0);
    let tc = 2.0 * i / (50.0 * d);
    let t = simulate(&single(i, load, lm), &cc("A", p), &opts).map_err(|e| e.to_string())?;
    let rel_err = (t.event_index() + 1..t.samples())
        .map(|k| {
            let want = -p / d * (1.0 - (-(t.time(k) - 1.0) / tc).exp());
            ((t.f[0][k] - 50.0 - want) / want).abs()
        })
        .fold(0.0, f64::max);
    check(rel_err <= 1e-6, || format!("damped relative error {rel_err:e}"))?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, || format!("took {secs:.2} s"))?;
    Ok(format!("ramp err {ramp_err:.1e} Hz, damped rel err {rel_err:.1e}, {secs:.3} s"))
}

// Initial RoCoF and the inertia requirement.
fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = SimOptions::default();
    let model = |i: f64| {
        // Load scales with the inertia of the system it belongs to.
        let mut m = single(i, i / 5.0, LoadModel::new(LoadKind::Dynamic));
        m.regions[0].governors.push(GovernorFleet { rating: 15_000.0, droop: 0.05, time_const: 0.5, headroom: 2_000.0 });
        m
    };
    let initial = |m: &DynModel, p: f64| -> Result<f64, String> {
        let t = simulate(m, &cc("A", p), &opts).map_err(|e| e.to_string())?;
        let k = t.event_index();
        let steps = (0.02 / t.dt).round() as usize;
        Ok((t.f[0][k + steps] - t.f[0][k]) / (steps as f64 * t.dt))
    };
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let i = rng.random_range(5_000.0..200_000.0);
        let p = rng.random_range(50.0..1_500.0);
        let want = -50.0 * p / (2.0 * i);
        let got = initial(&model(i), p)?;
        worst = worst.max(((got - want) / want).abs());
    }
    check(worst <= 0.01, || format!("initial RoCoF off by {:.2}%", 100.0 * worst))?;
    let mut worst_req = 0.0_f64;
    for _ in 0..20 {
        let p = rng.random_range(50.0..1_500.0);
        let i = min_inertia_requirement(p, 50.0, 0.5).map_err(|e| e.to_string())?;
        worst_req = worst_req.max((initial(&model(i), p)? + 0.5).abs());
    }
    check(worst_req <= 0.005, || format!("RoCoF at the requirement off by {worst_req:.4} Hz/s"))?;
    let a = min_inertia_requirement(666.0, 50.0, 0.5).map_err(|e| e.to_string())?;
    let b = min_inertia_requirement(600.0, 50.0, 0.5).map_err(|e| e.to_string())?;
    check((a - 33_300.0).abs() < 1e-9 && (b - 30_000.0).abs() < 1e-9, || format!("spot values {a}, {b}"))?;
    Ok(format!("worst initial-RoCoF error {:.3}%, at requirement ±{worst_req:.4} Hz/s, 666 MW → {a} MW·s", 100.0 * worst))
}

fn year_config(hours: usize) -> ScanConfig {
    let mut cfg = ScanConfig::default();
    cfg.inputs.traces = TraceSource::Synthetic { hours, seed: 1 };
    cfg
}

// Inertia constraint guarantees the RoCoF limit.
fn ac3() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = year_config(168);
    cfg.scenarios = LABELS.iter().map(|s| s.to_string()).collect();
    cfg.uc.inertia_constraint = InertiaConstraint::Regional;
    cfg.grid.load_models = vec![LoadKind::Static, LoadKind::Dynamic];
    cfg.grid.contingencies = vec![CcKind::Variable];
    cfg.grid.meter_all = true;
    cfg.output = dir.path().to_path_buf();
    let store = run_scan(&cfg).map_err(|e| e.to_string())?;
    // A scenario whose hours cannot satisfy the constraint is skipped as
    // infeasible; every other scenario must be fully scanned.
    let skipped: Vec<String> = store.skipped().iter().map(|s| s.scenario.clone()).collect();
    check(store.skipped().iter().all(|s| s.infeasible), || format!("non-infeasible skips: {:?}", store.skipped()))?;
    let recs = store.records().map_err(|e| e.to_string())?;
    let scanned = LABELS.len() - skipped.len();
    check(scanned > 0 && recs.len() == scanned * 2 * 4 * 4 * 168, || format!("{} records", recs.len()))?;
    let worst = recs.iter().min_by(|a, b| a.metrics.min_rocof.total_cmp(&b.metrics.min_rocof)).unwrap();
    check(worst.metrics.min_rocof >= -0.5 - 0.01, || {
        format!("{} hour {} meter {}: {:.4} Hz/s", worst.case_label, worst.hour, worst.meter, worst.metrics.min_rocof)
    })?;

    // Without governors or damping the slope at the event equals −f0·P/(2·I_r).
    let base = cfg.base_scenario().map_err(|e| e.to_string())?;
    let mut worst0 = 0.0_f64;
    for label in LABELS.iter().filter(|l| !skipped.iter().any(|s| s == *l)) {
        let s = cfg.scenario(&base, label).map_err(|e| e.to_string())?;
        let uc = solve_uc(&s, &cfg.inputs.network, &cfg.uc).map_err(|e| e.to_string())?;
        for h in &uc {
            for r in &cfg.inputs.network.regions {
                let Ok(c) = identify_regional_cc(h, &s.portfolio, r) else { continue };
                if c.size > 0.0 {
                    let mut m = build_multi_area_model(h, &s.portfolio, &cfg.inputs.network, &LoadModel::rigid(), &[], 50.0)
                        .map_err(|e| e.to_string())?;
                    m.regions.iter_mut().for_each(|x| x.governors.clear());
                    let k = m.region_index(r).unwrap();
                    worst0 = worst0.min(-50.0 * c.size / (2.0 * m.regions[k].inertia));
                }
            }
        }
    }
    check(worst0 >= -0.5 * (1.0 + 1e-9), || format!("initial RoCoF {worst0:.6} Hz/s"))?;
    Ok(format!(
        "{} records, worst windowed RoCoF {:.4} Hz/s ({} h{}), worst t=0⁺ slope {worst0:.4} Hz/s, \
         infeasible under the constraint: {skipped:?}",
        recs.len(),
        worst.metrics.min_rocof,
        worst.case_label,
        worst.hour
    ))
}

struct YearRun {
    label: &'static str,
    scenario: Scenario,
    uc: Vec<UcHour>,
    violations: usize,
    dispatch_s: f64,
}

fn dispatch_year(cfg: &ScanConfig) -> Result<Vec<YearRun>, String> {
    let base = cfg.base_scenario().map_err(|e| e.to_string())?;
    LABELS
        .iter()
        .map(|&label| {
            let scenario = cfg.scenario(&base, label).map_err(|e| format!("{label}: {e}"))?;
            let t = Instant::now();
            let uc = solve_uc(&scenario, &cfg.inputs.network, &cfg.uc).map_err(|e| format!("{label}: {e}"))?;
            let dispatch_s = t.elapsed().as_secs_f64();
            let violations = validate_uc(&uc, &scenario, &cfg.inputs.network, &cfg.uc).len();
            Ok(YearRun { label, scenario, uc, violations, dispatch_s })
        })
        .collect()
}

/// RoCoF-violation hours of one scenario-year for two case definitions:
/// the trend case NSxx-LsCvQLD-QLD, and the loss of the largest
/// dispatched unit anywhere metered in every region (dynamic load).
fn rocof_violation_hours(cfg: &ScanConfig, run: &YearRun) -> Result<((usize, usize), f64), String> {
    let th = Thresholds::default();
    let t = Instant::now();
    let net = &cfg.inputs.network;
    let q: RegionId = "QLD".into();
    let hits: Result<Vec<(bool, bool)>, String> = run
        .uc
        .par_iter()
        .map(|h| {
            let p = &run.scenario.portfolio;
            let build = |kind| {
                build_multi_area_model(h, p, net, &LoadModel::new(kind), &[], cfg.uc.f0).map_err(|e| e.to_string())
            };
            let trend = match identify_regional_cc(h, p, &q) {
                Ok(c) if c.size > 0.0 => {
                    let m = build(LoadKind::Static)?;
                    let tr = simulate(&m, &c, &cfg.sim).map_err(|e| e.to_string())?;
                    min_rocof(&tr, m.region_index(&q).unwrap(), th.window).map_err(|e| e.to_string())? < -th.rocof_crit
                }
                _ => false,
            };
            let system = match identify_system_cc(h, p) {
                Ok(c) if c.size > 0.0 => {
                    let m = build(LoadKind::Dynamic)?;
                    let tr = simulate(&m, &c, &cfg.sim).map_err(|e| e.to_string())?;
                    let mut any = false;
                    for r in 0..m.regions.len() {
                        any |= min_rocof(&tr, r, th.window).map_err(|e| e.to_string())? < -th.rocof_crit;
                    }
                    any
                }
                _ => false,
            };
            Ok((trend, system))
        })
        .collect();
    let hits = hits?;
    let count = |f: fn(&(bool, bool)) -> bool| hits.iter().filter(|x| f(x)).count();
    Ok(((count(|x| x.0), count(|x| x.1)), t.elapsed().as_secs_f64()))
}

// Trends across the scenario ladder on a synthetic year.
fn ac4(cfg: &ScanConfig, runs: &[YearRun]) -> Outcome {
    let mut medians = Vec::new();
    let mut spreads = Vec::new();
    let mut viol = Vec::new();
    let mut viol_sys = Vec::new();
    let mut cc_max = 0.0_f64;
    let mut cc_below = Vec::new();
    let mut worst_runtime = 0.0_f64;
    for run in runs {
        let inertia = sorted(run.uc.iter().map(|h| system_inertia(h, &run.scenario.portfolio)).collect());
        medians.push(percentile(&inertia, 0.5));
        spreads.push(percentile(&inertia, 0.95) - percentile(&inertia, 0.05));
        let sizes: Vec<f64> =
            run.uc.iter().filter_map(|h| identify_system_cc(h, &run.scenario.portfolio).ok()).map(|c| c.size).collect();
        cc_max = sizes.iter().copied().fold(cc_max, f64::max);
        cc_below.push(sizes.iter().filter(|&&s| s < 666.0 - 1e-9).count() as f64 / sizes.len().max(1) as f64);
        let ((v, vs), sim_s) = rocof_violation_hours(cfg, run)?;
        viol.push(v);
        viol_sys.push(vs);
        worst_runtime = worst_runtime.max(run.dispatch_s + sim_s);
    }
    let summary = format!(
        "median GW·s {:?}; P95−P5 GW·s {:?}; RoCoF-violation hours NSxx-LsCvQLD-QLD {viol:?} \
         (largest unit anywhere, any region: {viol_sys:?}); hours with CC < 666 MW (%) {:?}; \
         scenario-year ≤ {worst_runtime:.0} s",
        medians.iter().map(|m| (m / 1e2).round() / 10.0).collect::<Vec<_>>(),
        spreads.iter().map(|m| (m / 1e2).round() / 10.0).collect::<Vec<_>>(),
        cc_below.iter().map(|f| (f * 100.0).round()).collect::<Vec<_>>(),
    );
    let mut fails = Vec::new();
    if !medians.windows(2).all(|w| w[1] < w[0]) {
        fails.push("(a) median inertia not strictly decreasing");
    }
    if !spreads.windows(2).all(|w| w[1] > w[0]) {
        fails.push("(b) inertia spread not increasing");
    }
    if !viol.windows(2).all(|w| w[1] >= w[0]) {
        fails.push("(c) violation hours decrease somewhere");
    }
    // The variable CC never exceeds the fixed benchmark and falls
    // below it more often as penetration rises.
    if cc_max > 666.0 + 1e-9 || !cc_below.windows(2).all(|w| w[1] >= w[0]) || cc_below.last() <= cc_below.first() {
        fails.push("(d) variable CC does not shift below the 666 MW benchmark");
    }
    if worst_runtime > 600.0 {
        fails.push("runtime over 10 min");
    }
    if fails.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}: {summary}", fails.join(", ")))
    }
}

// SC, IE and DL on a fixed stressed case.
fn ac5() -> Outcome {
    let th = Thresholds::default();
    let opts = SimOptions::default();
    // The base case NS80-LdCvQLD-QLD on a synthetic week; the hour
    // with the steepest RoCoF in the Normal option is the stressed case.
    let cfg = year_config(168);
    let base = cfg.base_scenario().map_err(|e| e.to_string())?;
    let s = cfg.scenario(&base, "NS80").map_err(|e| e.to_string())?;
    let net = &cfg.inputs.network;
    let uc = solve_uc(&s, net, &cfg.uc).map_err(|e| e.to_string())?;
    let q: RegionId = "QLD".into();
    let lm = LoadModel::new(LoadKind::Dynamic);
    let run = |h: &UcHour, opt: DeviceOption| -> Result<_, String> {
        let spec = DeviceSpec { option: opt, wf_region: Some(q.clone()), ..Default::default() };
        let m = build_multi_area_model(h, &s.portfolio, net, &lm, &spec.roster(net), 50.0).map_err(|e| e.to_string())?;
        let c = identify_regional_cc(h, &s.portfolio, &q).map_err(|e| e.to_string())?;
        let t = simulate(&m, &c, &opts).map_err(|e| e.to_string())?;
        let r = m.region_index(&q).unwrap();
        let e = evaluate(&t, r, &th).map_err(|e| e.to_string())?;
        let inertia: Vec<f64> = m.regions.iter().map(|x| x.inertia).collect();
        let coi = t.centre_of_inertia(&inertia);
        let k = t.event_index();
        let steps = (0.02 / t.dt).round() as usize;
        let coi_rocof0 = (coi[k + steps] - coi[k]) / (steps as f64 * t.dt);
        Ok((e, m.total_inertia(), coi_rocof0))
    };
    let mut stressed = (0, f64::INFINITY);
    for (k, h) in uc.iter().enumerate() {
        let (e, _, _) = run(h, DeviceOption::Normal)?;
        if e.min_rocof < stressed.1 {
            stressed = (k, e.min_rocof);
        }
    }
    let h = &uc[stressed.0];
    let (normal, i_sys, r0) = run(h, DeviceOption::Normal)?;
    let (_, i_sc, r_sc) = run(h, DeviceOption::Sc)?;
    let (ie, _, _) = run(h, DeviceOption::Ie)?;
    let (dl, _, _) = run(h, DeviceOption::Dl)?;

    let ratio = r_sc / r0;
    let want = i_sys / (i_sys + 9_600.0);
    check((i_sc - i_sys - 9_600.0).abs() < 1e-6, || format!("SC adds {} MW·s", i_sc - i_sys))?;
    check(((ratio - want) / want).abs() <= 0.02, || format!("(a) SC RoCoF ratio {ratio:.4}, expected {want:.4}"))?;
    check(ie.min_rocof > normal.min_rocof, || format!("(b) IE {:.4} vs Normal {:.4}", ie.min_rocof, normal.min_rocof))?;
    check(
        dl.min_rocof > normal.min_rocof.max(ie.min_rocof)
            && dl.nadir > normal.nadir.max(ie.nadir)
            && dl.settling > normal.settling.max(ie.settling),
        || format!("(c) DL {dl:?}\nNormal {normal:?}\nIE {ie:?}"),
    )?;

    // Second frequency nadir: with governor headroom exhausted the grid pays
    // for the rotor re-acceleration after the first dip.
    let stressed_region = |dev: Option<Device>| -> Result<Vec<(f64, f64)>, String> {
        let mut r = RegionDyn::bare("A", 10_000.0, 15_000.0, LoadModel::new(LoadKind::Dynamic));
        r.governors.push(GovernorFleet { rating: 15_000.0, droop: 0.05, time_const: 0.5, headroom: 200.0 });
        r.devices.extend(dev);
        let m = DynModel { f0: 50.0, regions: vec![r], lines: vec![] };
        let t = simulate(&m, &cc("A", 300.0), &opts).map_err(|e| e.to_string())?;
        local_minima(&t, 0, 0.002).map_err(|e| e.to_string())
    };
    let n_normal = stressed_region(None)?.len();
    let ie_mins = stressed_region(Some(Device::InertiaEmulation(InertiaEmulation::default())))?;
    check(n_normal == 1 && ie_mins.len() == 2, || format!("(b) minima: Normal {n_normal}, IE {ie_mins:?}"))?;
    Ok(format!(
        "NS80-LdCvQLD-QLD hour {}: SC RoCoF ratio {ratio:.4} (want {want:.4}); min RoCoF N/IE/DL {:.3}/{:.3}/{:.3} Hz/s; \
         nadir {:.3}/{:.3}/{:.3} Hz; settling {:.3}/{:.3}/{:.3} Hz; IE minima at {:.2} s and {:.2} s",
        stressed.0,
        normal.min_rocof,
        ie.min_rocof,
        dl.min_rocof,
        normal.nadir,
        ie.nadir,
        dl.nadir,
        normal.settling,
        ie.settling,
        dl.settling,
        ie_mins[0].1,
        ie_mins[1].1
    ))
}

// Dispatch feasibility and optimality.
fn ac6(runs: &[YearRun]) -> Outcome {
    let audited: usize = runs.iter().map(|r| r.uc.len()).sum();
    let bad: Vec<String> = runs.iter().filter(|r| r.violations > 0).map(|r| format!("{}: {}", r.label, r.violations)).collect();
    check(bad.is_empty(), || format!("validator findings {bad:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0_f64;
    let mut feasible = 0;
    for k in 0..50 {
        let t = common::random_tiny(&mut rng);
        match (solve_uc(&t.scenario, &t.net, &t.opts), common::oracle_cost(&t)) {
            (Ok(uc), Some(w)) => {
                feasible += 1;
                check(validate_uc(&uc, &t.scenario, &t.net, &t.opts).is_empty(), || format!("tiny {k} not valid"))?;
                worst = worst.max(common::rel_gap(common::schedule_cost(&uc, &t.scenario.portfolio), w));
            }
            (Err(_), None) => {}
            (a, b) => return Err(format!("tiny {k}: solver {:?} vs oracle {b:?}", a.map(|_| ()))),
        }
    }
    check(worst <= 1e-3, || format!("tiny cost gap {:.3}%", 100.0 * worst))?;
    Ok(format!("{audited} dispatched hours clean; 50 tiny instances ({feasible} feasible), worst gap {:.1e}", worst))
}

// Sensitivity grid bookkeeping.
fn ac7() -> Outcome {
    let labels: Vec<String> = LABELS.iter().map(|s| s.to_string()).collect();
    let n = enumerate_cases(&labels, &nem_regions(), false).len();
    let runs = planned_runs(n, 8760);
    check(n == 144 && runs == 1_261_440, || format!("{n} cases, {runs} runs"))?;
    Ok(format!("{n} cases, {runs} runs"))
}

// Determinism across worker counts.
fn ac8() -> Outcome {
    let mut outputs = Vec::new();
    for workers in [1, 4, 8] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut cfg = year_config(48);
        cfg.scenarios = vec!["NS40".into(), "NS80".into()];
        cfg.workers = workers;
        cfg.checkpoint_every = 12;
        cfg.output = dir.path().to_path_buf();
        let store = run_scan(&cfg).map_err(|e| e.to_string())?;
        outputs.push(store.canonical_csv().map_err(|e| e.to_string())?);
    }
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count() - 1;
    check(rows == 2 * 16 * 48, || format!("{rows} records"))?;
    check(outputs.windows(2).all(|w| w[0] == w[1]), || "stores differ between worker counts".into())?;
    Ok(format!("{rows} records byte-identical for 1, 4 and 8 workers"))
}

fn main() {
    // Optional filter: criterion ids such as `AC4 AC5`.
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let want = |id: &str| only.is_empty() || only.iter().any(|o| o == id);
    let mut failed = 0;
    let mut report = |id: &str, name: &str, out: Outcome| match out {
        Ok(detail) => println!("PASS {id} {name}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("FAIL {id} {name}: {why}");
        }
    };
    if want("AC1") {
        report("AC1", "analytic single-region oracle", ac1());
    }
    if want("AC2") {
        report("AC2", "initial RoCoF and inertia requirement", ac2());
    }
    if want("AC3") {
        report("AC3", "regional inertia constraint holds RoCoF", ac3());
    }
    if want("AC4") || want("AC6") {
        let cfg = year_config(8760);
        let runs = dispatch_year(&cfg);
        if want("AC4") {
            report("AC4", "scenario trends on a synthetic year", runs.as_ref().map_err(Clone::clone).and_then(|r| ac4(&cfg, r)));
        }
        if want("AC6") {
            report("AC6", "dispatch feasibility and tiny-instance optimality", runs.as_ref().map_err(Clone::clone).and_then(|r| ac6(r)));
        }
    }
    if want("AC5") {
        report("AC5", "SC / IE / DL comparison", ac5());
    }
    if want("AC7") {
        report("AC7", "sensitivity grid bookkeeping", ac7());
    }
    if want("AC8") {
        report("AC8", "determinism across worker counts", ac8());
    }
    println!("{failed} criteria failed");
    // Failures are reported above; `--strict` turns them into a non-zero exit.
    if failed > 0 && std::env::args().any(|a| a == "--strict") {
        std::process::exit(1);
    }
}
