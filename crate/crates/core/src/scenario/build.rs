use super::portfolio::{GeneratorSpec, Tech};
use super::traces::HourlyTraceSet;
use super::{nsap_label, Scenario, ScenarioError};
use crate::region::RegionId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Technology and share of the synchronous capacity that replaces retired coal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplacementRule {
    pub tech: Tech,
    pub share: f64,
}

/// Knobs of penetration-targeted scenario construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioRules {
    /// Where new NS-RES capacity is sited. Empty means proportional to
    /// regional demand energy.
    pub ns_region_share: BTreeMap<RegionId, f64>,
    /// Wind fraction of new NS-RES capacity; the rest is utility PV.
    pub wind_share: f64,
    /// Cap on total NS-RES capacity, MW.
    pub max_ns_capacity_mw: f64,
    /// Accepted |estimated share − target|.
    pub tolerance: f64,
    /// Penetration at which all coal is gone.
    pub coal_phaseout_nsap: f64,
    /// Retired coal MW replaced per region, as a fraction.
    pub replacement_ratio: f64,
    pub replacement: Vec<ReplacementRule>,
    pub replacement_unit_mw: f64,
    /// Spinning reserve fraction below the phase-out penetration.
    pub reserve_fraction: f64,
}

impl Default for ScenarioRules {
    fn default() -> Self {
        ScenarioRules {
            ns_region_share: BTreeMap::new(),
            wind_share: 0.6,
            max_ns_capacity_mw: 150_000.0,
            tolerance: 0.02,
            coal_phaseout_nsap: 0.9,
            replacement_ratio: 0.8,
            replacement: vec![
                ReplacementRule { tech: Tech::Csp, share: 0.4 },
                ReplacementRule { tech: Tech::Ocgt, share: 0.6 },
            ],
            replacement_unit_mw: 300.0,
            reserve_fraction: 0.10,
        }
    }
}

fn ns_energy_per_mw(traces: &HourlyTraceSet, region: usize, tech: Tech) -> f64 {
    let t = &traces.traces()[region];
    match tech {
        Tech::Wind => t.wind_cf.iter().sum(),
        Tech::UtilityPv => t.solar_cf.iter().sum(),
        _ => 0.0,
    }
}

/// Potential NS-RES energy (available output, no curtailment) over demand
/// energy across the trace horizon.
pub fn potential_ns_share(portfolio: &[GeneratorSpec], traces: &HourlyTraceSet) -> f64 {
    let demand: f64 = (0..traces.hours()).map(|h| traces.total_demand(h)).sum();
    let ns: f64 = portfolio
        .iter()
        .filter(|g| g.tech.is_non_synchronous())
        .filter_map(|g| traces.region_index(&g.region).map(|r| g.capacity * ns_energy_per_mw(traces, r, g.tech)))
        .sum();
    ns / demand
}

fn siting(traces: &HourlyTraceSet, rules: &ScenarioRules) -> Vec<f64> {
    let regions = traces.regions();
    let raw: Vec<f64> = if rules.ns_region_share.is_empty() {
        traces.traces().iter().map(|t| t.demand.iter().sum()).collect()
    } else {
        regions.iter().map(|r| rules.ns_region_share.get(r).copied().unwrap_or(0.0).max(0.0)).collect()
    };
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// Derives the scenario for `target` from `base` by retiring coal in
/// descending SRMC order, replacing part of it with flexible synchronous
/// plant, and scaling NS-RES capacity until the potential NS-RES energy
/// share is within tolerance of the target.
pub fn build_scenario(base: &Scenario, target: f64, rules: &ScenarioRules) -> Result<Scenario, ScenarioError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(ScenarioError::InvalidTarget(target));
    }
    let traces = &base.traces;
    let mut portfolio = base.portfolio.clone();

    // Coal retirement.
    let phaseout = rules.coal_phaseout_nsap;
    let keep = if phaseout > base.target_nsap {
        ((phaseout - target) / (phaseout - base.target_nsap)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let coal_total: f64 = portfolio.iter().filter(|g| g.tech == Tech::Coal).map(|g| g.capacity).sum();
    let keep_mw = keep * coal_total;
    let mut coal: Vec<&GeneratorSpec> = portfolio.iter().filter(|g| g.tech == Tech::Coal).collect();
    coal.sort_by(|a, b| b.srmc.total_cmp(&a.srmc).then_with(|| a.id.cmp(&b.id)));
    let mut remaining = coal_total;
    let mut retired: Vec<String> = Vec::new();
    for g in coal {
        if remaining - keep_mw > 0.5 * g.capacity {
            remaining -= g.capacity;
            retired.push(g.id.clone());
        } else {
            break;
        }
    }
    let mut retired_by_region: BTreeMap<usize, f64> = BTreeMap::new();
    portfolio.retain(|g| {
        if retired.contains(&g.id) {
            let r = traces.region_index(&g.region).unwrap_or(usize::MAX);
            *retired_by_region.entry(r).or_default() += g.capacity;
            false
        } else {
            true
        }
    });

    // Replacement plant.
    let share_sum: f64 = rules.replacement.iter().map(|r| r.share).sum();
    for (&r, &mw) in &retired_by_region {
        let Some(region) = traces.regions().get(r) else { continue };
        for rule in &rules.replacement {
            if share_sum <= 0.0 || rules.replacement_unit_mw <= 0.0 {
                break;
            }
            let target_mw = mw * rules.replacement_ratio * rule.share / share_sum;
            let n = (target_mw / rules.replacement_unit_mw).round() as usize;
            for k in 0..n {
                portfolio.push(GeneratorSpec::new(
                    format!("{}_REP_{}_{:02}", rule.tech.name().to_uppercase(), region, k + 1),
                    region.clone(),
                    rule.tech,
                    rules.replacement_unit_mw,
                ));
            }
        }
    }

    // NS-RES scaling.
    let demand: f64 = (0..traces.hours()).map(|h| traces.total_demand(h)).sum();
    let s0 = potential_ns_share(&portfolio, traces);
    if (s0 - target).abs() > rules.tolerance {
        if target > s0 {
            let sites = siting(traces, rules);
            let per_mw: f64 = sites
                .iter()
                .enumerate()
                .map(|(r, w)| {
                    w * (rules.wind_share * ns_energy_per_mw(traces, r, Tech::Wind)
                        + (1.0 - rules.wind_share) * ns_energy_per_mw(traces, r, Tech::UtilityPv))
                })
                .sum();
            if per_mw <= 0.0 {
                return Err(ScenarioError::TargetUnreachable {
                    target,
                    reason: "sites chosen for new NS-RES have no wind or solar resource".into(),
                });
            }
            let add = (target - s0) * demand / per_mw;
            let existing: f64 =
                portfolio.iter().filter(|g| g.tech.is_non_synchronous()).map(|g| g.capacity).sum();
            if existing + add > rules.max_ns_capacity_mw {
                return Err(ScenarioError::TargetUnreachable {
                    target,
                    reason: format!(
                        "needs {:.0} MW of NS-RES, cap is {:.0} MW",
                        existing + add,
                        rules.max_ns_capacity_mw
                    ),
                });
            }
            for (r, w) in sites.iter().enumerate() {
                let region = &traces.regions()[r];
                for (tech, frac, prefix) in
                    [(Tech::Wind, rules.wind_share, "WF_NEW"), (Tech::UtilityPv, 1.0 - rules.wind_share, "PV_NEW")]
                {
                    let mw = add * w * frac;
                    if mw > 1e-9 {
                        portfolio.push(GeneratorSpec::new(format!("{prefix}_{region}"), region.clone(), tech, mw));
                    }
                }
            }
        } else {
            let scale = target / s0;
            for g in portfolio.iter_mut().filter(|g| g.tech.is_non_synchronous()) {
                g.capacity *= scale;
                g.ramp *= scale;
            }
        }
    }
    let achieved = potential_ns_share(&portfolio, traces);
    if (achieved - target).abs() > rules.tolerance + 1e-12 {
        return Err(ScenarioError::TargetUnreachable {
            target,
            reason: format!("estimated share {achieved:.4} outside tolerance"),
        });
    }

    let reserve_fraction = if target >= phaseout - 1e-9 { 0.0 } else { rules.reserve_fraction };
    let sc = Scenario { id: nsap_label(target), portfolio, traces: traces.clone(), reserve_fraction, target_nsap: target };
    sc.validate()?;
    Ok(sc)
}
