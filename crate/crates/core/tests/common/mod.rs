//! Test fixtures shared by integration and acceptance tests.
#![allow(dead_code)]

use freqscan_core::dispatch::{InertiaConstraint, Network, UcHour, UcOptions};
use freqscan_core::scenario::{GeneratorSpec, HourlyTraceSet, RegionTrace, Scenario, Tech};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

/// A dispatch instance small enough to enumerate.
#[derive(Debug, Clone)]
pub struct Tiny {
    pub scenario: Scenario,
    pub net: Network,
    pub opts: UcOptions,
}

pub fn random_tiny<R: Rng>(rng: &mut R) -> Tiny {
    let two = rng.random_bool(0.4);
    let regions: Vec<&str> = if two { vec!["A", "B"] } else { vec!["A"] };
    let hours = rng.random_range(1..=4usize);
    let n = rng.random_range(2..=4usize);
    let techs = [Tech::Coal, Tech::Ccgt, Tech::Ocgt, Tech::Hydro, Tech::Csp];
    let mut units = Vec::new();
    for k in 0..n {
        let region = regions[rng.random_range(0..regions.len())];
        let roll = rng.random_range(0.0..1.0);
        let tech = if k > 0 && roll < 0.25 {
            Tech::Wind
        } else if k > 0 && roll < 0.4 {
            Tech::SynCon
        } else {
            techs[rng.random_range(0..techs.len())]
        };
        let cap = rng.random_range(50.0..300.0);
        let mut g = GeneratorSpec::new(format!("u{k}"), region, tech, cap);
        if tech.is_dispatchable_synchronous() {
            g.srmc = rng.random_range(10.0..150.0);
            g.min_stable = rng.random_range(0.0..0.5);
            g.ramp = cap * rng.random_range(0.2..1.0);
            g.min_up = rng.random_range(1..=3);
            g.min_down = rng.random_range(1..=3);
            g.fixed_cost = rng.random_range(0.0..500.0);
            g.startup_cost = rng.random_range(0.0..2000.0);
            g.shutdown_cost = rng.random_range(0.0..200.0);
        } else if tech == Tech::SynCon {
            g.fixed_cost = rng.random_range(0.0..100.0);
            g.startup_cost = rng.random_range(0.0..200.0);
        }
        units.push(g);
    }
    // A flexible peaker so most instances are feasible.
    if !units.iter().any(|g| g.tech.is_dispatchable_synchronous()) {
        units[0] = GeneratorSpec::new("u0", "A", Tech::Ocgt, 400.0);
    }
    let traces = regions
        .iter()
        .map(|_| RegionTrace {
            demand: (0..hours).map(|_| rng.random_range(20.0..250.0)).collect(),
            wind_cf: (0..hours).map(|_| rng.random_range(0.0..1.0)).collect(),
            solar_cf: vec![0.0; hours],
            rooftop_pv_cf: vec![0.0; hours],
        })
        .collect();
    let traces = HourlyTraceSet::new(regions.iter().map(|r| (*r).into()).collect(), traces).unwrap();
    let net = if two {
        let mut net = Network::nem();
        net.regions = vec!["A".into(), "B".into()];
        net.lines.truncate(1);
        net.lines[0].from = "A".into();
        net.lines[0].to = "B".into();
        net.lines[0].limit = rng.random_range(20.0..200.0);
        net
    } else {
        Network::single("A")
    };
    let mut opts = UcOptions::default();
    if rng.random_bool(0.5) {
        opts.inertia_constraint = InertiaConstraint::Regional;
        opts.rocof_crit = rng.random_range(1.0..5.0);
    }
    let reserve = if rng.random_bool(0.5) { rng.random_range(0.0..0.15) } else { 0.0 };
    let scenario = Scenario { reserve_fraction: reserve, ..Scenario::base(units, traces, 0.1) };
    Tiny { scenario, net, opts }
}

/// Objective of a dispatch result: energy at SRMC plus fixed, start-up and
/// shut-down costs, with every unit offline before the first hour.
pub fn schedule_cost(uc: &[UcHour], portfolio: &[GeneratorSpec]) -> f64 {
    let mut cost = 0.0;
    for (i, g) in portfolio.iter().enumerate() {
        let mut prev = false;
        for h in uc {
            let u = h.units[i];
            cost += g.srmc * u.p;
            if !g.tech.is_non_synchronous() {
                if u.on {
                    cost += g.fixed_cost;
                    if !prev {
                        cost += g.startup_cost;
                    }
                } else if prev {
                    cost += g.shutdown_cost;
                }
                prev = u.on;
            }
        }
    }
    cost
}

fn min_times_ok(col: &[bool], min_up: usize, min_down: usize) -> bool {
    let n = col.len();
    let mut t = 0;
    let mut seen_on = false;
    while t < n {
        let s = t;
        while t < n && col[t] == col[s] {
            t += 1;
        }
        if t < n {
            if col[s] && t - s < min_up {
                return false;
            }
            if !col[s] && seen_on && t - s < min_down {
                return false;
            }
        }
        seen_on |= col[s];
    }
    true
}

/// Cheapest cost over every commitment schedule, each dispatched by one
/// LP spanning the whole horizon. `None` when nothing is feasible.
pub fn oracle_cost(t: &Tiny) -> Option<f64> {
    let p = &t.scenario.portfolio;
    let tr = &t.scenario.traces;
    let hours = tr.hours();
    let nr = t.net.regions.len();
    let region: Vec<usize> = p.iter().map(|g| t.net.region_index(&g.region).unwrap()).collect();
    let commit: Vec<usize> = (0..p.len()).filter(|&i| !p[i].tech.is_non_synchronous()).collect();
    let bits = commit.len() * hours;
    assert!(bits <= 20, "instance too large to enumerate");
    let mut best: Option<f64> = None;
    'mask: for mask in 0u32..(1 << bits) {
        let on = |k: usize, h: usize| mask >> (k * hours + h) & 1 == 1;
        let mut fixed = 0.0;
        for (k, &i) in commit.iter().enumerate() {
            let col: Vec<bool> = (0..hours).map(|h| on(k, h)).collect();
            if !min_times_ok(&col, p[i].min_up.max(1) as usize, p[i].min_down.max(1) as usize) {
                continue 'mask;
            }
            let mut prev = false;
            for &c in &col {
                if c {
                    fixed += p[i].fixed_cost + if prev { 0.0 } else { p[i].startup_cost };
                } else if prev {
                    fixed += p[i].shutdown_cost;
                }
                prev = c;
            }
        }
        let is_on = |i: usize, h: usize| commit.iter().position(|&c| c == i).is_some_and(|k| on(k, h));

        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let mut vars = vec![vec![None; p.len()]; hours];
        for h in 0..hours {
            let mut inertia = vec![0.0; nr];
            for (i, g) in p.iter().enumerate() {
                if is_on(i, h) {
                    inertia[region[i]] += g.inertia_const * g.capacity;
                }
            }
            for (i, g) in p.iter().enumerate() {
                let r = region[i];
                let bounds = match g.tech {
                    Tech::Wind | Tech::UtilityPv => {
                        let tr = &tr.traces()[tr.region_index(&g.region).unwrap()];
                        let cf = if g.tech == Tech::Wind { tr.wind_cf[h] } else { tr.solar_cf[h] };
                        Some((0.0, g.capacity * cf))
                    }
                    Tech::SynCon => None,
                    _ if is_on(i, h) => {
                        let mut hi = g.capacity;
                        if t.opts.inertia_constraint == InertiaConstraint::Regional {
                            hi = hi.min(2.0 * t.opts.rocof_crit * inertia[r] / t.opts.f0);
                        }
                        let lo = g.min_stable * g.capacity;
                        if lo > hi + 1e-9 {
                            continue 'mask;
                        }
                        Some((lo, hi.max(lo)))
                    }
                    _ => None,
                };
                vars[h][i] = bounds.map(|b| lp.add_var(g.srmc, b));
            }
        }
        let mut flows = vec![vec![]; hours];
        for (h, fl) in flows.iter_mut().enumerate() {
            *fl = t.net.lines.iter().map(|l| lp.add_var(0.0, (-l.limit, l.limit))).collect::<Vec<_>>();
            let ends = t.net.line_ends();
            for r in 0..nr {
                let mut row = Vec::new();
                for (i, v) in vars[h].iter().enumerate() {
                    if let (Some(v), true) = (v, region[i] == r) {
                        row.push((*v, 1.0));
                    }
                }
                for (l, &(a, b)) in ends.iter().enumerate() {
                    if a == r {
                        row.push((fl[l], -1.0));
                    }
                    if b == r {
                        row.push((fl[l], 1.0));
                    }
                }
                lp.add_constraint(&row, ComparisonOp::Eq, tr.demand(r, h));
                // Spinning reserve on committed energy-producing units.
                let mut cap = 0.0;
                let mut row = Vec::new();
                for (i, g) in p.iter().enumerate() {
                    if region[i] == r && g.tech.is_dispatchable_synchronous() && is_on(i, h) {
                        cap += g.capacity;
                        row.push((vars[h][i].unwrap(), 1.0));
                    }
                }
                let need = t.opts.reserve_fraction.unwrap_or(t.scenario.reserve_fraction) * tr.demand(r, h);
                if cap < need - 1e-9 {
                    continue 'mask;
                }
                if !row.is_empty() {
                    lp.add_constraint(&row, ComparisonOp::Le, cap - need);
                }
            }
            if h > 0 {
                for (i, g) in p.iter().enumerate() {
                    if let (Some(a), Some(b), true) = (vars[h - 1][i], vars[h][i], g.tech.is_dispatchable_synchronous()) {
                        lp.add_constraint([(b, 1.0), (a, -1.0)], ComparisonOp::Le, g.ramp);
                        lp.add_constraint([(a, 1.0), (b, -1.0)], ComparisonOp::Le, g.ramp);
                    }
                }
            }
        }
        if let Some(sol) = lp.solve().ok().and_then(|o| o.into_solution().ok()) {
            let c = sol.objective() + fixed;
            if best.is_none_or(|b| c < b) {
                best = Some(c);
            }
        }
    }
    best
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
