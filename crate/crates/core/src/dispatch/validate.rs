//! Independent feasibility audit of a dispatch result.
//!
//! Works from the scenario and network directly rather than from the
//! solver's internal model, so a solver bug cannot hide itself.

use super::{InertiaConstraint, Network, UcHour, UcOptions};
use crate::region::RegionId;
use crate::scenario::{Scenario, Tech};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape { hour: usize, what: &'static str },
    OffWithOutput { hour: usize, gen: String, p: f64 },
    BelowMinStable { hour: usize, gen: String, p: f64, min: f64 },
    CapacityViolation { hour: usize, gen: String, p: f64, capacity: f64 },
    NsAboveAvailable { hour: usize, gen: String, p: f64, available: f64 },
    SynConOutput { hour: usize, gen: String, p: f64 },
    Balance { hour: usize, region: RegionId, mismatch: f64 },
    NetDemandField { hour: usize, region: RegionId, reported: f64, actual: f64 },
    LineLimit { hour: usize, line: usize, flow: f64, limit: f64 },
    ReserveField { hour: usize, region: RegionId, reported: f64, actual: f64 },
    ReserveShortfall { hour: usize, region: RegionId, reserve: f64, required: f64 },
    InertiaField { hour: usize, region: RegionId, reported: f64, actual: f64 },
    InertiaShortfall { hour: usize, region: RegionId, inertia: f64, required: f64 },
    CurtailmentField { hour: usize, region: RegionId, reported: f64, actual: f64 },
    Ramp { gen: String, from_hour: usize, to_hour: usize, delta: f64, ramp: f64 },
    /// Started at `start`, stopped at `stop` (first offline hour).
    MinUpViolation { gen: String, start: usize, stop: usize },
    /// Stopped at `stop`, restarted at `start`.
    MinDownViolation { gen: String, stop: usize, start: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

fn tol(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Re-checks every per-hour invariant and inter-hour constraint of `result`.
/// The result is taken to be a contiguous horizon with all units offline
/// before its first hour.
pub fn validate_uc(result: &[UcHour], scenario: &Scenario, net: &Network, opts: &UcOptions) -> ViolationReport {
    let mut v = Vec::new();
    let portfolio = &scenario.portfolio;
    let traces = &scenario.traces;
    let rf = opts.reserve_fraction.unwrap_or(scenario.reserve_fraction);
    let nr = net.regions.len();
    let region_of: Vec<Option<usize>> = portfolio.iter().map(|g| net.region_index(&g.region)).collect();
    let ends = net.line_ends();

    for uc in result {
        let h = uc.hour;
        if uc.units.len() != portfolio.len() {
            v.push(Violation::Shape { hour: h, what: "unit count" });
            continue;
        }
        if uc.regions.len() != nr || uc.curtailed_ns.len() != nr {
            v.push(Violation::Shape { hour: h, what: "region count" });
            continue;
        }
        if uc.tie_flows.len() != net.lines.len() {
            v.push(Violation::Shape { hour: h, what: "line count" });
            continue;
        }
        if h >= traces.hours() {
            v.push(Violation::Shape { hour: h, what: "hour outside traces" });
            continue;
        }

        let mut gen = vec![0.0; nr];
        let mut reserve = vec![0.0; nr];
        let mut inertia = vec![0.0; nr];
        let mut ns_used = vec![0.0; nr];
        let mut ns_avail = vec![0.0; nr];
        let mut largest = vec![0.0_f64; nr];
        for (i, (g, u)) in portfolio.iter().zip(&uc.units).enumerate() {
            let Some(r) = region_of[i] else {
                v.push(Violation::Shape { hour: h, what: "generator outside network" });
                continue;
            };
            let tr = traces.region(&g.region).expect("network regions have traces");
            if !u.on && u.p != 0.0 {
                v.push(Violation::OffWithOutput { hour: h, gen: g.id.clone(), p: u.p });
            }
            gen[r] += u.p;
            match g.tech {
                Tech::Wind | Tech::UtilityPv => {
                    let cf = if g.tech == Tech::Wind { tr.wind_cf[h] } else { tr.solar_cf[h] };
                    let avail = g.capacity * cf;
                    ns_avail[r] += avail;
                    ns_used[r] += u.p;
                    if u.p > avail + tol(avail) {
                        v.push(Violation::NsAboveAvailable { hour: h, gen: g.id.clone(), p: u.p, available: avail });
                    }
                    if u.p < -tol(0.0) {
                        v.push(Violation::CapacityViolation { hour: h, gen: g.id.clone(), p: u.p, capacity: g.capacity });
                    }
                }
                Tech::SynCon => {
                    if u.p != 0.0 {
                        v.push(Violation::SynConOutput { hour: h, gen: g.id.clone(), p: u.p });
                    }
                    if u.on {
                        inertia[r] += g.inertia_const * g.capacity;
                    }
                }
                _ => {
                    if u.on {
                        let min = g.min_stable * g.capacity;
                        if u.p < min - tol(min) {
                            v.push(Violation::BelowMinStable { hour: h, gen: g.id.clone(), p: u.p, min });
                        }
                        if u.p > g.capacity + tol(g.capacity) {
                            v.push(Violation::CapacityViolation { hour: h, gen: g.id.clone(), p: u.p, capacity: g.capacity });
                        }
                        reserve[r] += g.capacity - u.p;
                        inertia[r] += g.inertia_const * g.capacity;
                        largest[r] = largest[r].max(u.p);
                    }
                }
            }
        }
        for (l, (&(a, b), line)) in ends.iter().zip(&net.lines).enumerate() {
            let f = uc.tie_flows[l];
            gen[a] -= f;
            gen[b] += f;
            if f.abs() > line.limit + tol(line.limit) {
                v.push(Violation::LineLimit { hour: h, line: l, flow: f, limit: line.limit });
            }
        }
        for (r, region) in net.regions.iter().enumerate() {
            let d = traces.region(region).map(|t| t.demand[h]).unwrap_or(0.0);
            let rs = &uc.regions[r];
            if (gen[r] - d).abs() > tol(d) {
                v.push(Violation::Balance { hour: h, region: region.clone(), mismatch: gen[r] - d });
            }
            if (rs.net_demand - d).abs() > tol(d) {
                v.push(Violation::NetDemandField { hour: h, region: region.clone(), reported: rs.net_demand, actual: d });
            }
            if (rs.reserve - reserve[r]).abs() > tol(reserve[r]) {
                v.push(Violation::ReserveField { hour: h, region: region.clone(), reported: rs.reserve, actual: reserve[r] });
            }
            let required = rf * d;
            if reserve[r] < required - tol(required) {
                v.push(Violation::ReserveShortfall { hour: h, region: region.clone(), reserve: reserve[r], required });
            }
            if (rs.inertia - inertia[r]).abs() > tol(inertia[r]) {
                v.push(Violation::InertiaField { hour: h, region: region.clone(), reported: rs.inertia, actual: inertia[r] });
            }
            if opts.inertia_constraint == InertiaConstraint::Regional && largest[r] > 0.0 {
                let required = opts.f0 * largest[r] / (2.0 * opts.rocof_crit);
                if inertia[r] < required - tol(required) {
                    v.push(Violation::InertiaShortfall { hour: h, region: region.clone(), inertia: inertia[r], required });
                }
            }
            let curtailed = ns_avail[r] - ns_used[r];
            if (uc.curtailed_ns[r] - curtailed).abs() > tol(ns_avail[r]) {
                v.push(Violation::CurtailmentField {
                    hour: h,
                    region: region.clone(),
                    reported: uc.curtailed_ns[r],
                    actual: curtailed,
                });
            }
        }
    }

    // Inter-hour constraints.
    for (i, g) in portfolio.iter().enumerate() {
        if g.tech.is_non_synchronous() {
            continue;
        }
        let mut prev: Option<(usize, bool, f64)> = None;
        let mut last_start: Option<usize> = None;
        let mut last_stop: Option<usize> = None;
        for uc in result {
            let Some(u) = uc.units.get(i) else { continue };
            let was_on = prev.is_some_and(|(ph, on, _)| on && ph + 1 == uc.hour);
            if let Some((ph, pon, pp)) = prev {
                if pon && u.on && ph + 1 == uc.hour && g.tech != Tech::SynCon && (u.p - pp).abs() > g.ramp + tol(g.ramp) {
                    v.push(Violation::Ramp { gen: g.id.clone(), from_hour: ph, to_hour: uc.hour, delta: u.p - pp, ramp: g.ramp });
                }
            }
            if u.on && !was_on {
                if let Some(stop) = last_stop {
                    if uc.hour - stop < g.min_down as usize {
                        v.push(Violation::MinDownViolation { gen: g.id.clone(), stop, start: uc.hour });
                    }
                }
                last_start = Some(uc.hour);
            }
            if !u.on && prev.is_some_and(|(_, on, _)| on) {
                if let Some(start) = last_start {
                    if uc.hour - start < g.min_up as usize {
                        v.push(Violation::MinUpViolation { gen: g.id.clone(), start, stop: uc.hour });
                    }
                }
                last_stop = Some(uc.hour);
            }
            prev = Some((uc.hour, u.on, u.p));
        }
    }
    ViolationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{RegionState, UnitState};
    use crate::scenario::{GeneratorSpec, HourlyTraceSet, RegionTrace};

    fn scenario(hours: usize) -> Scenario {
        let tr = RegionTrace {
            demand: vec![100.0; hours],
            wind_cf: vec![0.0; hours],
            solar_cf: vec![0.0; hours],
            rooftop_pv_cf: vec![0.0; hours],
        };
        let traces = HourlyTraceSet::new(vec!["A".into()], vec![tr]).unwrap();
        let mut g = GeneratorSpec::new("g", "A", Tech::Coal, 200.0);
        g.min_up = 3;
        g.min_down = 2;
        Scenario { reserve_fraction: 0.0, ..Scenario::base(vec![g], traces, 0.1) }
    }

    fn hour(h: usize, on: bool, p: f64) -> UcHour {
        UcHour {
            hour: h,
            units: vec![UnitState { on, p }],
            regions: vec![RegionState {
                reserve: if on { 200.0 - p } else { 0.0 },
                inertia: if on { 1200.0 } else { 0.0 },
                net_demand: 100.0,
            }],
            tie_flows: vec![],
            curtailed_ns: vec![0.0],
            binding: vec![],
        }
    }

    #[test]
    fn feasible_hand_result_is_clean() {
        let s = scenario(3);
        let r: Vec<UcHour> = (0..3).map(|h| hour(h, true, 100.0)).collect();
        assert!(validate_uc(&r, &s, &Network::single("A"), &UcOptions::default()).is_empty());
    }

    #[test]
    fn planted_capacity_violation() {
        let s = scenario(1);
        let mut r = vec![hour(0, true, 100.0)];
        r[0].units[0].p = 250.0;
        r[0].regions[0].reserve = -50.0;
        let rep = validate_uc(&r, &s, &Network::single("A"), &UcOptions::default());
        let caps = rep.violations.iter().filter(|v| matches!(v, Violation::CapacityViolation { .. })).count();
        assert_eq!(caps, 1);
    }

    #[test]
    fn min_up_violation_names_both_hours() {
        let s = scenario(4);
        // Scenario demand is unmet in off hours, which is not the point here.
        let r = vec![hour(0, true, 100.0), hour(1, false, 0.0)];
        let rep = validate_uc(&r, &s, &Network::single("A"), &UcOptions::default());
        let mu: Vec<_> = rep.violations.iter().filter(|v| matches!(v, Violation::MinUpViolation { .. })).collect();
        assert_eq!(mu, vec![&Violation::MinUpViolation { gen: "g".into(), start: 0, stop: 1 }]);
    }

    #[test]
    fn min_down_and_ramp_violations() {
        let s = scenario(4);
        let r = vec![
            hour(0, true, 100.0),
            hour(1, true, 100.0),
            hour(2, true, 200.0),
            hour(3, false, 0.0),
        ];
        let rep = validate_uc(&r, &s, &Network::single("A"), &UcOptions::default());
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Ramp { from_hour: 1, to_hour: 2, .. })));
        let r = vec![hour(0, true, 100.0), hour(1, true, 100.0), hour(2, true, 100.0), hour(3, false, 0.0), hour(4, true, 100.0)];
        let s = scenario(5);
        let rep = validate_uc(&r, &s, &Network::single("A"), &UcOptions::default());
        assert!(rep.violations.contains(&Violation::MinDownViolation { gen: "g".into(), stop: 3, start: 4 }));
    }
}
