//! Exact single-hour economic dispatch for a fixed commitment.
//!
//! The hour is a min-cost flow from the generators to regional demand over
//! the transfer graph: transfers are free, NS-RES offers at zero cost, and a
//! committed synchronous unit offers `hi − lo` at its SRMC above a must-run
//! block `lo`. Local spinning reserve caps the flexible synchronous output of
//! each region. Because every transfer arc costs nothing, a shortest
//! augmenting path is simply the cheapest offer with a residual route to
//! unmet demand, so successive shortest paths reduce to walking the offers in
//! cost order.

use super::model::{Model, UnitKind};
use super::ConstraintKind;
use std::collections::VecDeque;

pub(crate) const EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Limit {
    Capacity,
    Ramp,
    Inertia,
}

#[derive(Debug, Clone)]
pub(crate) struct EdOutcome {
    /// MW per unit; zero for uncommitted units and SynCons.
    pub p: Vec<f64>,
    pub flows: Vec<f64>,
    pub curtailed: Vec<f64>,
    pub energy_cost: f64,
    /// Upper dispatch bound of each committed thermal unit and what set it.
    pub upper: Vec<(f64, Limit)>,
    /// Region whose flexible output hit the reserve cap.
    pub reserve_bound: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct EdFailure {
    pub kind: ConstraintKind,
    pub region: usize,
}

/// Previous-hour state for ramp limits.
pub(crate) struct Prev<'a> {
    pub on: &'a [bool],
    pub p: &'a [f64],
}

enum Offer {
    MustRun(usize),
    Ns(usize),
    Unit(usize),
}

pub(crate) fn dispatch_hour(m: &Model, t: usize, on: &[bool], prev: Option<Prev<'_>>) -> Result<EdOutcome, EdFailure> {
    let nr = m.regions();
    let nu = m.units.len();
    let demand = &m.demand[t];

    let mut inertia = vec![0.0; nr];
    for (i, u) in m.units.iter().enumerate() {
        if on[i] && u.commitable() {
            inertia[u.region] += u.stored;
        }
    }
    let cap_inertia: Vec<f64> = inertia
        .iter()
        .map(|&i| if m.inertia { super::max_cc_for_inertia(i, m.f0, m.rocof_crit) } else { f64::INFINITY })
        .collect();

    let mut lo = vec![0.0; nu];
    let mut upper = vec![(0.0, Limit::Capacity); nu];
    let mut sum_lo = vec![0.0; nr];
    let mut sum_cap = vec![0.0; nr];
    for (i, u) in m.units.iter().enumerate() {
        if !on[i] || u.kind != UnitKind::Thermal {
            continue;
        }
        let (mut l, mut h, mut lim) = (u.lo, u.cap, Limit::Capacity);
        if let Some(pr) = &prev {
            if pr.on[i] {
                l = l.max(pr.p[i] - u.ramp);
                if pr.p[i] + u.ramp < h {
                    h = pr.p[i] + u.ramp;
                    lim = Limit::Ramp;
                }
            }
        }
        if cap_inertia[u.region] < h {
            h = cap_inertia[u.region];
            lim = Limit::Inertia;
        }
        if l > h + EPS {
            let kind = if l > cap_inertia[u.region] + EPS { ConstraintKind::Inertia } else { ConstraintKind::Ramp };
            return Err(EdFailure { kind, region: u.region });
        }
        h = h.max(l);
        lo[i] = l;
        upper[i] = (h, lim);
        sum_lo[u.region] += l;
        sum_cap[u.region] += u.cap;
    }

    let mut hub = vec![0.0; nr];
    for r in 0..nr {
        let s = sum_cap[r] - m.reserve_fraction * demand[r] - sum_lo[r];
        if s < -EPS {
            return Err(EdFailure { kind: ConstraintKind::Reserve, region: r });
        }
        hub[r] = s.max(0.0);
    }

    let mut deficit = vec![0.0; nr];
    let mut offers: Vec<(Offer, f64)> = Vec::with_capacity(nu + 2 * nr);
    for r in 0..nr {
        let need = demand[r] - sum_lo[r];
        if need >= 0.0 {
            deficit[r] = need;
        } else {
            offers.push((Offer::MustRun(r), -need));
        }
    }
    let ns_avail: Vec<f64> = (0..nr).map(|r| m.ns_avail_region(r, t)).collect();
    for (r, &a) in ns_avail.iter().enumerate() {
        offers.push((Offer::Ns(r), a));
    }
    for &i in &m.merit {
        if on[i] {
            offers.push((Offer::Unit(i), upper[i].0 - lo[i]));
        }
    }

    let mut flows = vec![0.0; m.lines.len()];
    let mut alloc = vec![0.0; nu];
    let mut ns_used = vec![0.0; nr];

    for (offer, mut remaining) in offers {
        let r = match offer {
            Offer::MustRun(r) | Offer::Ns(r) => r,
            Offer::Unit(i) => m.units[i].region,
        };
        loop {
            let avail = match offer {
                Offer::Unit(_) => remaining.min(hub[r]),
                _ => remaining,
            };
            if avail <= EPS {
                break;
            }
            let Some((dest, path)) = route(m, &flows, &deficit, r) else { break };
            let mut amount = avail.min(deficit[dest]);
            for &(l, dir) in &path {
                amount = amount.min(residual(m, &flows, l, dir));
            }
            for &(l, dir) in &path {
                flows[l] += if dir { amount } else { -amount };
            }
            deficit[dest] -= amount;
            remaining -= amount;
            match offer {
                Offer::Unit(i) => {
                    alloc[i] += amount;
                    hub[r] -= amount;
                }
                Offer::Ns(r) => ns_used[r] += amount,
                Offer::MustRun(_) => {}
            }
        }
        if let Offer::MustRun(r) = offer {
            if remaining > EPS {
                return Err(EdFailure { kind: ConstraintKind::Overgeneration, region: r });
            }
        }
    }

    if let Some(k) = (0..nr).filter(|&r| deficit[r] > EPS).max_by(|&a, &b| deficit[a].total_cmp(&deficit[b]).then(b.cmp(&a))) {
        return Err(classify_shortage(m, on, &flows, &alloc, &lo, &upper, &hub, k));
    }

    let mut p = vec![0.0; nu];
    let mut energy_cost = 0.0;
    for (i, u) in m.units.iter().enumerate() {
        if on[i] && u.kind == UnitKind::Thermal {
            p[i] = (lo[i] + alloc[i]).min(upper[i].0);
            energy_cost += u.srmc * p[i];
        }
    }
    let mut curtailed = vec![0.0; nr];
    for r in 0..nr {
        let used = ns_used[r].min(ns_avail[r]);
        curtailed[r] = (ns_avail[r] - used).max(0.0);
        if ns_avail[r] > 0.0 {
            let share = used / ns_avail[r];
            for &i in &m.ns_units[r] {
                p[i] = m.ns_avail(i, t) * share;
                energy_cost += m.units[i].srmc * p[i];
            }
        }
    }
    let reserve_bound = hub.iter().map(|&h| h <= EPS).collect();
    Ok(EdOutcome { p, flows, curtailed, energy_cost, upper, reserve_bound })
}

fn residual(m: &Model, flows: &[f64], l: usize, forward: bool) -> f64 {
    let lim = m.lines[l].2;
    if forward {
        lim - flows[l]
    } else {
        lim + flows[l]
    }
}

/// Breadth-first route from `src` to the nearest region with unmet demand.
/// Returns the destination and the path as (line, forward?) hops.
fn route(m: &Model, flows: &[f64], deficit: &[f64], src: usize) -> Option<(usize, Vec<(usize, bool)>)> {
    if deficit[src] > EPS {
        return Some((src, vec![]));
    }
    let nr = m.regions();
    let mut parent: Vec<Option<(usize, usize, bool)>> = vec![None; nr];
    let mut seen = vec![false; nr];
    seen[src] = true;
    let mut q = VecDeque::from([src]);
    while let Some(a) = q.pop_front() {
        for (l, &(x, y, _)) in m.lines.iter().enumerate() {
            for (from, to, fwd) in [(x, y, true), (y, x, false)] {
                if from != a || seen[to] || residual(m, flows, l, fwd) <= EPS {
                    continue;
                }
                seen[to] = true;
                parent[to] = Some((a, l, fwd));
                if deficit[to] > EPS {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while let Some((p, l, fwd)) = parent[cur] {
                        path.push((l, fwd));
                        cur = p;
                    }
                    path.reverse();
                    return Some((to, path));
                }
                q.push_back(to);
            }
        }
    }
    None
}

/// Names the constraint most responsible for unmet demand in region `k`.
#[allow(clippy::too_many_arguments)]
fn classify_shortage(
    m: &Model,
    on: &[bool],
    flows: &[f64],
    alloc: &[f64],
    lo: &[f64],
    upper: &[(f64, Limit)],
    hub: &[f64],
    k: usize,
) -> EdFailure {
    // Regions with a residual route into k.
    let nr = m.regions();
    let mut reach = vec![false; nr];
    reach[k] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (l, &(x, y, _)) in m.lines.iter().enumerate() {
            for (from, to, fwd) in [(x, y, true), (y, x, false)] {
                if reach[to] && !reach[from] && residual(m, flows, l, fwd) > EPS {
                    reach[from] = true;
                    changed = true;
                }
            }
        }
    }
    let unit_slack = |i: usize| upper[i].0 - lo[i] - alloc[i] > EPS;
    let thermal_on = |i: usize| on[i] && m.units[i].kind == UnitKind::Thermal;
    let candidates: Vec<usize> = (0..nr).filter(|&r| reach[r]).collect();
    for &r in &candidates {
        if hub[r] <= EPS && (0..m.units.len()).any(|i| thermal_on(i) && m.units[i].region == r && unit_slack(i)) {
            return EdFailure { kind: ConstraintKind::Reserve, region: r };
        }
    }
    for lim in [Limit::Inertia, Limit::Ramp] {
        for &r in &candidates {
            if (0..m.units.len()).any(|i| thermal_on(i) && m.units[i].region == r && upper[i].1 == lim) {
                let kind = if lim == Limit::Inertia { ConstraintKind::Inertia } else { ConstraintKind::Ramp };
                return EdFailure { kind, region: r };
            }
        }
    }
    EdFailure { kind: ConstraintKind::Balance, region: k }
}
