//! Credible contingencies and the sensitivity-case grid.
//!
//! The credible contingency of an hour is the loss of the synchronous unit
//! with the largest dispatch (per system or per region). The fixed variant
//! trips a constant block (666 MW by default) of generic generation.
//!
//! Case labels read `NS40-LdCvNSW-SA`: scenario, load model (`Ls`/`Ld`),
//! contingency kind (`Cv`/`Cf`), event location, then the metered region.

use crate::dispatch::UcHour;
use crate::dynamics::LoadKind;
use crate::region::RegionId;
use crate::scenario::{parse_nsap_label, GeneratorSpec};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ContingencyError {
    #[error("no synchronous unit is dispatched{}", .region.as_ref().map(|r| format!(" in {r}")).unwrap_or_default())]
    NoSynchronousUnit { region: Option<RegionId> },
    #[error("malformed case label `{0}`")]
    MalformedLabel(String),
    #[error("region id `{0}` cannot appear in a case label")]
    UnsafeRegionId(RegionId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CcKind {
    Variable,
    Fixed,
}

/// What trips, where, and how much.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyCase {
    pub region: RegionId,
    /// MW
    pub size: f64,
    pub kind: CcKind,
    pub tripped_unit: Option<String>,
    /// Synchronous inertia leaving with the trip, MW·s. Zero for variable
    /// contingencies: the inertia requirement is sized against the
    /// committed inertia including the largest unit.
    pub inertia_removed: f64,
}

/// Fixed-contingency settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedCcConfig {
    /// MW
    pub size: f64,
    /// Remove an equivalent machine's inertia along with the power.
    pub remove_inertia: bool,
    /// Inertia constant of the equivalent machine, s.
    pub h_equiv: f64,
}

impl Default for FixedCcConfig {
    fn default() -> Self {
        FixedCcConfig { size: 666.0, remove_inertia: true, h_equiv: 6.0 }
    }
}

fn largest_unit<'a>(
    uc: &UcHour,
    portfolio: &'a [GeneratorSpec],
    region: Option<&RegionId>,
) -> Option<(&'a GeneratorSpec, f64)> {
    let mut best: Option<(&GeneratorSpec, f64)> = None;
    for (g, u) in portfolio.iter().zip(&uc.units) {
        if !u.on || u.p <= 0.0 || !g.tech.is_dispatchable_synchronous() {
            continue;
        }
        if region.is_some_and(|r| &g.region != r) {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, p)) => u.p > p || (u.p == p && g.id < b.id),
        };
        if better {
            best = Some((g, u.p));
        }
    }
    best
}

/// The dispatched synchronous unit with the largest output (ties → lowest id).
pub fn identify_system_cc(uc: &UcHour, portfolio: &[GeneratorSpec]) -> Result<ContingencyCase, ContingencyError> {
    let (g, p) = largest_unit(uc, portfolio, None).ok_or(ContingencyError::NoSynchronousUnit { region: None })?;
    Ok(ContingencyCase {
        region: g.region.clone(),
        size: p,
        kind: CcKind::Variable,
        tripped_unit: Some(g.id.clone()),
        inertia_removed: 0.0,
    })
}

/// As [`identify_system_cc`], restricted to one region.
pub fn identify_regional_cc(
    uc: &UcHour,
    portfolio: &[GeneratorSpec],
    region: &RegionId,
) -> Result<ContingencyCase, ContingencyError> {
    let (g, p) = largest_unit(uc, portfolio, Some(region))
        .ok_or_else(|| ContingencyError::NoSynchronousUnit { region: Some(region.clone()) })?;
    Ok(ContingencyCase {
        region: region.clone(),
        size: p,
        kind: CcKind::Variable,
        tripped_unit: Some(g.id.clone()),
        inertia_removed: 0.0,
    })
}

/// The fixed contingency at `location`, before any per-hour adjustment.
pub fn fixed_cc(location: &RegionId, cfg: &FixedCcConfig) -> ContingencyCase {
    ContingencyCase {
        region: location.clone(),
        size: cfg.size,
        kind: CcKind::Fixed,
        tripped_unit: None,
        inertia_removed: if cfg.remove_inertia { cfg.h_equiv * cfg.size } else { 0.0 },
    }
}

/// The fixed contingency applied to one hour: capped at the region's
/// synchronous dispatch, with the removed inertia limited to the share of
/// regional inertia the tripped block represents.
pub fn fixed_cc_for_hour(
    location: &RegionId,
    uc: &UcHour,
    portfolio: &[GeneratorSpec],
    cfg: &FixedCcConfig,
) -> ContingencyCase {
    let mut dispatch = 0.0;
    let mut rating = 0.0;
    let mut inertia = 0.0;
    for (g, u) in portfolio.iter().zip(&uc.units) {
        if u.on && &g.region == location && g.tech.is_dispatchable_synchronous() {
            dispatch += u.p;
            rating += g.capacity;
            inertia += g.stored_energy();
        }
    }
    let mut case = fixed_cc(location, cfg);
    if case.size > dispatch {
        log::debug!("hour {}: fixed contingency in {location} capped at {dispatch:.1} MW", uc.hour);
        case.size = dispatch;
    }
    if cfg.remove_inertia {
        let share = if rating > 0.0 { inertia * case.size / rating } else { 0.0 };
        // Never strip a region bare; keep at least 1 % of its inertia.
        case.inertia_removed = (cfg.h_equiv * case.size).min(share).min(0.99 * inertia).max(0.0);
    }
    case
}

/// One cell of the sensitivity grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensitivityCase {
    pub scenario: String,
    pub load_model: LoadKind,
    pub contingency_kind: CcKind,
    pub location: RegionId,
    pub meter: RegionId,
}

impl SensitivityCase {
    /// The label with the scenario prefix removed, e.g. `LdCvNSW-SA`.
    pub fn family(&self) -> String {
        let label = case_label(self);
        label.split_once('-').map(|(_, rest)| rest.to_string()).unwrap_or(label)
    }
}

/// Scenarios × {Static, Dynamic} × {Variable, Fixed} × locations, metered at
/// the location or, with `meter_all`, at every region.
pub fn enumerate_cases(scenarios: &[String], regions: &[RegionId], meter_all: bool) -> Vec<SensitivityCase> {
    let mut out = Vec::new();
    for s in scenarios {
        for load in [LoadKind::Static, LoadKind::Dynamic] {
            for kind in [CcKind::Variable, CcKind::Fixed] {
                for loc in regions {
                    let meters: Vec<&RegionId> = if meter_all { regions.iter().collect() } else { vec![loc] };
                    for meter in meters {
                        out.push(SensitivityCase {
                            scenario: s.clone(),
                            load_model: load,
                            contingency_kind: kind,
                            location: loc.clone(),
                            meter: meter.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Number of simulation runs in a plan.
pub fn planned_runs(cases: usize, hours: usize) -> u64 {
    cases as u64 * hours as u64
}

pub fn case_label(c: &SensitivityCase) -> String {
    let l = match c.load_model {
        LoadKind::Static => 's',
        LoadKind::Dynamic => 'd',
    };
    let k = match c.contingency_kind {
        CcKind::Variable => 'v',
        CcKind::Fixed => 'f',
    };
    format!("{}-L{l}C{k}{}-{}", c.scenario, c.location, c.meter)
}

/// Inverse of [`case_label`].
pub fn parse_label(label: &str) -> Result<SensitivityCase, ContingencyError> {
    let bad = || ContingencyError::MalformedLabel(label.to_string());
    let (scenario, rest) = label.split_once('-').ok_or_else(bad)?;
    parse_nsap_label(scenario).ok_or_else(bad)?;
    let (head, meter) = rest.split_once('-').ok_or_else(bad)?;
    let mut chars = head.chars();
    if chars.next() != Some('L') {
        return Err(bad());
    }
    let load_model = match chars.next() {
        Some('s') => LoadKind::Static,
        Some('d') => LoadKind::Dynamic,
        _ => return Err(bad()),
    };
    if chars.next() != Some('C') {
        return Err(bad());
    }
    let contingency_kind = match chars.next() {
        Some('v') => CcKind::Variable,
        Some('f') => CcKind::Fixed,
        _ => return Err(bad()),
    };
    let location = RegionId::from(chars.as_str());
    let meter = RegionId::from(meter);
    if !location.is_label_safe() || !meter.is_label_safe() {
        return Err(bad());
    }
    Ok(SensitivityCase { scenario: scenario.to_string(), load_model, contingency_kind, location, meter })
}

pub const CASE_CSV_HEADER: &str = "label,scenario,load_model,kind,location,meter";

pub fn write_case_csv<W: Write>(mut out: W, cases: &[SensitivityCase]) -> io::Result<()> {
    writeln!(out, "{CASE_CSV_HEADER}")?;
    for c in cases {
        writeln!(
            out,
            "{},{},{:?},{:?},{},{}",
            case_label(c),
            c.scenario,
            c.load_model,
            c.contingency_kind,
            c.location,
            c.meter
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{RegionState, UnitState};
    use crate::region::nem_regions;
    use crate::scenario::Tech;
    use proptest::prelude::*;

    fn hour(ps: &[(bool, f64)]) -> UcHour {
        UcHour {
            hour: 0,
            units: ps.iter().map(|&(on, p)| UnitState { on, p }).collect(),
            regions: vec![RegionState::default()],
            tie_flows: vec![],
            curtailed_ns: vec![],
            binding: vec![],
        }
    }

    fn units(specs: &[(&str, &str, f64)]) -> Vec<GeneratorSpec> {
        specs.iter().map(|&(id, r, c)| GeneratorSpec::new(id, r, Tech::Coal, c)).collect()
    }

    #[test]
    fn system_cc_is_max_dispatch() {
        let p = units(&[("A", "X", 100.0), ("B", "X", 100.0)]);
        let cc = identify_system_cc(&hour(&[(true, 60.0), (true, 40.0)]), &p).unwrap();
        assert_eq!((cc.tripped_unit.as_deref(), cc.size), (Some("A"), 60.0));
    }

    #[test]
    fn ties_go_to_lowest_id_in_either_order() {
        for (first, second) in [("a1", "b2"), ("b2", "a1")] {
            let p = units(&[(first, "X", 100.0), (second, "X", 100.0)]);
            let cc = identify_system_cc(&hour(&[(true, 50.0), (true, 50.0)]), &p).unwrap();
            assert_eq!(cc.tripped_unit.as_deref(), Some("a1"));
        }
    }

    #[test]
    fn part_loaded_largest_unit() {
        let p = units(&[("big", "X", 666.0), ("small", "X", 300.0)]);
        let cc = identify_system_cc(&hour(&[(true, 333.0), (true, 200.0)]), &p).unwrap();
        assert_eq!(cc.size, 333.0);
        assert!(cc.size < 666.0);
    }

    #[test]
    fn regional_cc_and_missing_units() {
        let mut p = units(&[("q", "QLD", 400.0), ("n", "NSW", 500.0)]);
        p.push(GeneratorSpec::new("w", "SA", Tech::Wind, 900.0));
        let uc = hour(&[(true, 400.0), (true, 450.0), (true, 800.0)]);
        assert_eq!(identify_regional_cc(&uc, &p, &"QLD".into()).unwrap().size, 400.0);
        assert_eq!(
            identify_regional_cc(&uc, &p, &"SA".into()),
            Err(ContingencyError::NoSynchronousUnit { region: Some("SA".into()) })
        );
        let no_sync = hour(&[(false, 0.0), (false, 0.0), (true, 800.0)]);
        assert!(identify_system_cc(&no_sync, &p).is_err());
    }

    #[test]
    fn fixed_cc_defaults_and_override() {
        let cc = fixed_cc(&"QLD".into(), &FixedCcConfig::default());
        assert_eq!((cc.region.as_str(), cc.size, cc.kind), ("QLD", 666.0, CcKind::Fixed));
        assert_eq!(cc, fixed_cc(&"QLD".into(), &FixedCcConfig::default()));
        let cfg = FixedCcConfig { size: 500.0, ..Default::default() };
        assert_eq!(fixed_cc(&"QLD".into(), &cfg).size, 500.0);
    }

    #[test]
    fn fixed_cc_is_capped_by_regional_dispatch() {
        let p = units(&[("a", "SA", 350.0), ("b", "SA", 350.0)]);
        let uc = hour(&[(true, 200.0), (true, 150.0)]);
        let cc = fixed_cc_for_hour(&"SA".into(), &uc, &p, &FixedCcConfig::default());
        assert_eq!(cc.size, 350.0);
        // Share of the 4200 MW·s regional inertia: 4200·350/700.
        assert!((cc.inertia_removed - 2100.0).abs() < 1e-9);
    }

    #[test]
    fn grid_sizes() {
        let scen: Vec<String> = (1..=9).map(|k| format!("NS{}0", k)).collect();
        let cases = enumerate_cases(&scen, &nem_regions(), false);
        assert_eq!(cases.len(), 144);
        assert_eq!(planned_runs(cases.len(), 8760), 1_261_440);
        assert_eq!(enumerate_cases(&scen[..1], &nem_regions()[..1], false).len(), 4);
        let labels: std::collections::HashSet<String> = cases.iter().map(case_label).collect();
        assert_eq!(labels.len(), 144);
        assert_eq!(enumerate_cases(&scen[..1], &nem_regions(), true).len(), 64);
    }

    #[test]
    fn label_examples() {
        let c = SensitivityCase {
            scenario: "NS40".into(),
            load_model: LoadKind::Dynamic,
            contingency_kind: CcKind::Variable,
            location: "NSW".into(),
            meter: "SA".into(),
        };
        assert_eq!(case_label(&c), "NS40-LdCvNSW-SA");
        assert_eq!(c.family(), "LdCvNSW-SA");
        let c = SensitivityCase {
            scenario: "NS80".into(),
            load_model: LoadKind::Static,
            contingency_kind: CcKind::Variable,
            location: "QLD".into(),
            meter: "QLD".into(),
        };
        assert_eq!(case_label(&c), "NS80-LsCvQLD-QLD");
        for bad in ["NS80", "NS80-LxCvQLD-QLD", "NS8-LsCvQLD-QLD", "NS80-LsCvQLD", "NS80-LsCvQ-LD-QLD", "NS80-LsCv-QLD"] {
            assert!(parse_label(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn labels_round_trip(
            s in 1u32..100,
            dynamic: bool,
            fixed: bool,
            loc in "[A-Z][A-Z0-9_]{0,5}",
            meter in "[A-Z][A-Z0-9_]{0,5}",
        ) {
            let c = SensitivityCase {
                scenario: format!("NS{s:02}"),
                load_model: if dynamic { LoadKind::Dynamic } else { LoadKind::Static },
                contingency_kind: if fixed { CcKind::Fixed } else { CcKind::Variable },
                location: loc.as_str().into(),
                meter: meter.as_str().into(),
            };
            prop_assert_eq!(parse_label(&case_label(&c)).unwrap(), c);
        }

        #[test]
        fn max_of_regional_is_system(ps in prop::collection::vec((0usize..3, 0.0f64..700.0), 1..12)) {
            let regions = ["R0", "R1", "R2"];
            let portfolio: Vec<GeneratorSpec> = ps
                .iter()
                .enumerate()
                .map(|(i, &(r, _))| GeneratorSpec::new(format!("g{i:02}"), regions[r], Tech::Coal, 700.0))
                .collect();
            let uc = hour(&ps.iter().map(|&(_, p)| (p > 0.0, p)).collect::<Vec<_>>());
            let sys = identify_system_cc(&uc, &portfolio).unwrap();
            let best = regions
                .iter()
                .filter_map(|r| identify_regional_cc(&uc, &portfolio, &(*r).into()).ok())
                .map(|c| c.size)
                .fold(0.0, f64::max);
            prop_assert_eq!(sys.size, best);
            // Brute force per region.
            for (k, r) in regions.iter().enumerate() {
                let brute = ps.iter().filter(|&&(rr, p)| rr == k && p > 0.0).map(|&(_, p)| p).fold(None, |a: Option<f64>, p| Some(a.map_or(p, |a| a.max(p))));
                let got = identify_regional_cc(&uc, &portfolio, &(*r).into()).ok().map(|c| c.size);
                prop_assert_eq!(got, brute);
            }
        }
    }
}
