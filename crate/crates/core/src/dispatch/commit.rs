//! Commitment search.
//!
//! 1. Hourly construction: starting from the previous hour's set, add units
//!    in the region named by each dispatch failure (SynCons first for an
//!    inertia shortfall), then drop or add units while the hour's cost falls.
//! 2. Minimum up/down repair: short on-blocks are extended, short off-gaps
//!    filled.
//! 3. Forward sweep with ramp limits, repairing any hour that fails by
//!    starting (or stopping) units in a way that keeps min up/down intact.
//! 4. Local search over each unit's on-blocks (drop, fill gap, shift an edge)
//!    priced by re-dispatching the affected hours.
//!
//! Horizons whose whole commitment space has at most `2^exact_max_bits`
//! schedules are also enumerated exhaustively and the cheaper answer kept.

use super::ed::{dispatch_hour, EdFailure, EdOutcome, Limit, Prev, EPS};
use super::lp::dispatch_window;
use super::model::{Model, UnitKind};
use super::{
    BindingReason, BindingTag, ConstraintKind, DispatchError, Network, RegionState, UcHour, UcOptions, UnitState,
};
use crate::scenario::Scenario;
use std::collections::HashMap;

/// Solves commitment and dispatch over the options' horizon. Units start
/// the horizon offline.
pub fn solve_uc(scenario: &Scenario, net: &Network, opts: &UcOptions) -> Result<Vec<UcHour>, DispatchError> {
    let m = Model::build(scenario, net, opts)?;
    let heuristic = Search::new(&m, opts.search_budget).run();
    let bits = m.commit_units.len() * m.hours;
    let exact = if bits as u32 <= opts.exact_max_bits { enumerate(&m) } else { None };

    let plan = match (heuristic, exact) {
        (Ok(h), Some(e)) => {
            if e.cost < h.cost - 1e-9 * h.cost.abs().max(1.0) {
                e
            } else {
                h
            }
        }
        (Ok(h), None) => h,
        (Err(_), Some(e)) => e,
        (Err(f), None) => {
            return Err(DispatchError::Infeasible {
                hour: m.start + f.hour,
                constraint: f.kind,
                region: m.region_ids[f.region].clone(),
            })
        }
    };
    log::debug!("dispatch cost {:.1} over {} hours", plan.cost, m.hours);
    Ok(finalize(&m, &plan))
}

#[derive(Debug, Clone, Copy)]
struct Failure {
    hour: usize,
    kind: ConstraintKind,
    region: usize,
}

struct Plan {
    on: Vec<Vec<bool>>,
    out: Vec<EdOutcome>,
    cost: f64,
}

/// On-blocks of unit `u` as inclusive hour ranges.
fn blocks(on: &[Vec<bool>], u: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    let mut start = None;
    for (t, row) in on.iter().enumerate() {
        match (row[u], start) {
            (true, None) => start = Some(t),
            (false, Some(s)) => {
                v.push((s, t - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        v.push((s, on.len() - 1));
    }
    v
}

/// Whether a unit's schedule respects minimum up and down times. Blocks and
/// gaps that run into the end of the horizon are exempt; the unit is taken
/// to have been offline for long before the first hour.
fn min_times_ok(m: &Model, u: usize, col: &[bool]) -> bool {
    let t_end = col.len();
    let unit = &m.units[u];
    let mut t = 0;
    let mut seen_on = false;
    while t < t_end {
        let state = col[t];
        let s = t;
        while t < t_end && col[t] == state {
            t += 1;
        }
        let len = t - s;
        if t < t_end {
            if state && len < unit.min_up {
                return false;
            }
            if !state && seen_on && len < unit.min_down {
                return false;
            }
        }
        seen_on |= state;
    }
    true
}

fn unit_commit_cost(m: &Model, u: usize, col: impl Iterator<Item = bool>) -> f64 {
    let unit = &m.units[u];
    let mut cost = 0.0;
    let mut prev = false;
    for on in col {
        if on {
            cost += unit.fixed;
            if !prev {
                cost += unit.startup;
            }
        } else if prev {
            cost += unit.shutdown;
        }
        prev = on;
    }
    cost
}

fn plan_cost(m: &Model, on: &[Vec<bool>], out: &[EdOutcome]) -> f64 {
    let energy: f64 = out.iter().map(|o| o.energy_cost).sum();
    let commit: f64 = m.commit_units.iter().map(|&u| unit_commit_cost(m, u, on.iter().map(|r| r[u]))).sum();
    energy + commit
}

fn same_dispatch(a: &EdOutcome, b: &EdOutcome) -> bool {
    a.p.iter().zip(&b.p).all(|(x, y)| (x - y).abs() <= 1e-9)
}

struct Search<'a> {
    m: &'a Model,
    on: Vec<Vec<bool>>,
    out: Vec<EdOutcome>,
    budget: usize,
    /// Priority for energy additions (lower first).
    add_key: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(m: &'a Model, budget: usize) -> Self {
        let add_key = m
            .units
            .iter()
            .map(|u| match u.kind {
                UnitKind::Thermal => u.srmc + (u.fixed + u.startup / u.min_up as f64) / u.cap,
                UnitKind::SynCon => (u.fixed + u.startup / u.min_up as f64) / u.stored.max(1e-9),
                _ => f64::INFINITY,
            })
            .collect();
        Search { m, on: Vec::new(), out: Vec::new(), budget, add_key }
    }

    fn run(mut self) -> Result<Plan, Failure> {
        self.construct()?;
        for &u in &self.m.commit_units.clone() {
            self.enforce_min_times(u);
        }
        self.sweep()?;
        self.local_search();
        let cost = plan_cost(self.m, &self.on, &self.out);
        Ok(Plan { on: self.on, out: self.out, cost })
    }

    fn ed(&self, t: usize, on: &[bool], prev: Option<(&[bool], &[f64])>) -> Result<EdOutcome, EdFailure> {
        dispatch_hour(self.m, t, on, prev.map(|(on, p)| Prev { on, p }))
    }

    fn hour_cost(&self, on: &[bool], out: &EdOutcome) -> f64 {
        out.energy_cost + self.m.commit_units.iter().filter(|&&u| on[u]).map(|&u| self.m.units[u].fixed).sum::<f64>()
    }

    /// Picks an offline unit that addresses `f`; `allowed` filters by
    /// inter-temporal feasibility.
    fn pick_addition(&self, on: &[bool], f: EdFailure, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        let m = self.m;
        let off = |u: usize| !on[u] && allowed(u);
        let in_region = |u: usize, r: usize| m.units[u].region == r;
        let best = |it: &mut dyn Iterator<Item = usize>, key: &dyn Fn(usize) -> f64| {
            it.min_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)))
        };
        match f.kind {
            ConstraintKind::Inertia => {
                let syn = best(
                    &mut m.commit_units.iter().copied().filter(|&u| {
                        off(u) && in_region(u, f.region) && m.units[u].kind == UnitKind::SynCon
                    }),
                    &|u| self.add_key[u],
                );
                syn.or_else(|| {
                    best(
                        &mut m.merit.iter().copied().filter(|&u| off(u) && in_region(u, f.region)),
                        &|u| m.units[u].srmc,
                    )
                })
            }
            ConstraintKind::Reserve => best(
                &mut m.merit.iter().copied().filter(|&u| off(u) && in_region(u, f.region)),
                &|u| self.add_key[u],
            ),
            _ => {
                // Nearest regions first.
                for r in self.regions_by_distance(f.region) {
                    if let Some(u) =
                        best(&mut m.merit.iter().copied().filter(|&u| off(u) && in_region(u, r)), &|u| self.add_key[u])
                    {
                        return Some(u);
                    }
                }
                None
            }
        }
    }

    fn regions_by_distance(&self, from: usize) -> Vec<usize> {
        let nr = self.m.regions();
        let mut dist = vec![usize::MAX; nr];
        dist[from] = 0;
        let mut order = vec![from];
        let mut i = 0;
        while i < order.len() {
            let a = order[i];
            for &(x, y, _) in &self.m.lines {
                for (p, q) in [(x, y), (y, x)] {
                    if p == a && dist[q] == usize::MAX {
                        dist[q] = dist[a] + 1;
                        order.push(q);
                    }
                }
            }
            i += 1;
        }
        order
    }

    fn pick_removal(&self, on: &[bool], region: usize, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        self.m
            .merit
            .iter()
            .rev()
            .copied()
            .find(|&u| on[u] && self.m.units[u].region == region && allowed(u))
    }

    /// Step 1: hour-by-hour sets ignoring inter-temporal constraints.
    fn construct(&mut self) -> Result<(), Failure> {
        let m = self.m;
        let nu = m.units.len();
        let mut set = vec![false; nu];
        for t in 0..m.hours {
            let mut attempts = 0;
            let mut out = loop {
                match self.ed(t, &set, None) {
                    Ok(o) => break o,
                    Err(f) => {
                        attempts += 1;
                        let fix = if f.kind == ConstraintKind::Overgeneration {
                            self.pick_removal(&set, f.region, &|_| true).map(|u| (u, false))
                        } else {
                            self.pick_addition(&set, f, &|_| true).map(|u| (u, true))
                        };
                        match fix {
                            Some((u, state)) if attempts <= 4 * nu => set[u] = state,
                            _ => return Err(Failure { hour: t, kind: f.kind, region: f.region }),
                        }
                    }
                }
            };
            // Economic decommitment, most expensive first.
            let mut order: Vec<usize> = m.commit_units.iter().copied().filter(|&u| set[u]).collect();
            order.sort_by(|&a, &b| self.add_key[b].total_cmp(&self.add_key[a]).then(a.cmp(&b)));
            let mut cost = self.hour_cost(&set, &out);
            for u in order {
                set[u] = false;
                match self.ed(t, &set, None) {
                    Ok(o) if self.hour_cost(&set, &o) < cost - 1e-9 => {
                        cost = self.hour_cost(&set, &o);
                        out = o;
                    }
                    _ => set[u] = true,
                }
            }
            // Economic commitment of cheaper units than the marginal one.
            let marginal = m
                .merit
                .iter()
                .filter(|&&u| set[u] && out.p[u] > m.units[u].lo + EPS)
                .map(|&u| m.units[u].srmc)
                .fold(f64::NEG_INFINITY, f64::max);
            let candidates: Vec<usize> =
                m.merit.iter().copied().filter(|&u| !set[u] && m.units[u].srmc < marginal).take(3).collect();
            for u in candidates {
                set[u] = true;
                match self.ed(t, &set, None) {
                    Ok(o) if self.hour_cost(&set, &o) < cost - 1e-9 => {
                        cost = self.hour_cost(&set, &o);
                        out = o;
                    }
                    _ => set[u] = false,
                }
            }
            self.on.push(set.clone());
            self.out.push(out);
        }
        Ok(())
    }

    /// Step 2: extend short blocks and fill short gaps of one unit.
    fn enforce_min_times(&mut self, u: usize) {
        let t_end = self.m.hours;
        let unit = &self.m.units[u];
        loop {
            let bl = blocks(&self.on, u);
            let mut changed = false;
            for (k, &(s, e)) in bl.iter().enumerate() {
                if e + 1 < t_end && e + 1 - s < unit.min_up {
                    for t in s..(s + unit.min_up).min(t_end) {
                        self.on[t][u] = true;
                    }
                    changed = true;
                    break;
                }
                if let Some(&(s2, _)) = bl.get(k + 1) {
                    if s2 - e - 1 < unit.min_down {
                        for t in e + 1..s2 {
                            self.on[t][u] = true;
                        }
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Whether unit `u` (offline at `t`) may start at `t`.
    fn may_start(&self, u: usize, t: usize) -> bool {
        let min_down = self.m.units[u].min_down;
        let mut k = t;
        while k > 0 && !self.on[k - 1][u] {
            k -= 1;
        }
        k == 0 || t - k >= min_down
    }

    /// Starts `u` at `t` for at least its minimum up time, closing any
    /// resulting short gap.
    fn start_unit(&mut self, u: usize, t: usize) {
        let unit = &self.m.units[u];
        let t_end = self.m.hours;
        let mut e = (t + unit.min_up).min(t_end);
        for k in t..e {
            self.on[k][u] = true;
        }
        // Gap up to the next block.
        let mut nxt = e;
        while nxt < t_end && !self.on[nxt][u] {
            nxt += 1;
        }
        if nxt < t_end && nxt - e < unit.min_down {
            while e < nxt {
                self.on[e][u] = true;
                e += 1;
            }
        }
    }

    /// Whether `u` (online at `t`) may stop at `t` for the rest of its block.
    fn may_stop(&self, u: usize, t: usize) -> bool {
        let unit = &self.m.units[u];
        let t_end = self.m.hours;
        let mut s = t;
        while s > 0 && self.on[s - 1][u] {
            s -= 1;
        }
        if s < t && t - s < unit.min_up {
            return false;
        }
        if s == t {
            // The whole block goes; the surrounding gaps merge.
            return true;
        }
        let mut e = t;
        while e < t_end && self.on[e][u] {
            e += 1;
        }
        let mut nxt = e;
        while nxt < t_end && !self.on[nxt][u] {
            nxt += 1;
        }
        nxt == t_end || nxt - t >= unit.min_down
    }

    fn stop_unit(&mut self, u: usize, t: usize) {
        let mut k = t;
        while k < self.m.hours && self.on[k][u] {
            self.on[k][u] = false;
            k += 1;
        }
    }

    /// Step 3: forward sweep with ramp limits.
    fn sweep(&mut self) -> Result<(), Failure> {
        let m = self.m;
        for t in 0..m.hours {
            let mut attempts = 0;
            loop {
                let res = if t == 0 {
                    self.ed(0, &self.on[0], None)
                } else {
                    self.ed(t, &self.on[t], Some((&self.on[t - 1], &self.out[t - 1].p)))
                };
                match res {
                    Ok(o) => {
                        self.out[t] = o;
                        break;
                    }
                    Err(f) => {
                        attempts += 1;
                        let fail = Failure { hour: t, kind: f.kind, region: f.region };
                        if attempts > 4 * m.units.len() {
                            return Err(fail);
                        }
                        if f.kind == ConstraintKind::Overgeneration {
                            let on_t = self.on[t].clone();
                            match self.pick_removal(&on_t, f.region, &|u| self.may_stop(u, t)) {
                                Some(u) => self.stop_unit(u, t),
                                None => return Err(fail),
                            }
                        } else {
                            let on_t = self.on[t].clone();
                            match self.pick_addition(&on_t, f, &|u| self.may_start(u, t)) {
                                Some(u) => self.start_unit(u, t),
                                None => return Err(fail),
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-dispatches from the first changed hour of `u`'s new column and
    /// keeps the change if it lowers the total cost.
    fn try_column(&mut self, u: usize, col: &[bool]) -> bool {
        let m = self.m;
        let t_end = m.hours;
        let Some(a) = (0..t_end).find(|&t| col[t] != self.on[t][u]) else { return false };
        let b = (0..t_end).rev().find(|&t| col[t] != self.on[t][u]).unwrap_or(a);
        if !min_times_ok(m, u, col) {
            return false;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let old_commit = unit_commit_cost(m, u, self.on.iter().map(|r| r[u]));
        let new_commit = unit_commit_cost(m, u, col.iter().copied());
        let saved: Vec<bool> = (a..=b).map(|t| self.on[t][u]).collect();
        for t in a..=b {
            self.on[t][u] = col[t];
        }
        let coupled = m.ramps_can_bind();
        let mut fresh: Vec<EdOutcome> = Vec::new();
        let mut ok = true;
        let mut t = a;
        while t < t_end {
            if t > b && !coupled {
                break;
            }
            let prev_p: Option<&[f64]> = if t == 0 {
                None
            } else if t > a {
                Some(&fresh[t - 1 - a].p)
            } else {
                Some(&self.out[t - 1].p)
            };
            let res = match prev_p {
                None => self.ed(t, &self.on[t], None),
                Some(p) => self.ed(t, &self.on[t], Some((&self.on[t - 1], p))),
            };
            match res {
                Ok(o) => {
                    let settled = t > b && same_dispatch(&o, &self.out[t]);
                    fresh.push(o);
                    t += 1;
                    if settled {
                        break;
                    }
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let old_energy: f64 = (a..a + fresh.len()).map(|t| self.out[t].energy_cost).sum();
            let new_energy: f64 = fresh.iter().map(|o| o.energy_cost).sum();
            let delta = new_energy - old_energy + new_commit - old_commit;
            if delta < -1e-7 * (1.0 + old_energy.abs()) {
                for (k, o) in fresh.into_iter().enumerate() {
                    self.out[a + k] = o;
                }
                return true;
            }
        }
        for (k, v) in saved.into_iter().enumerate() {
            self.on[a + k][u] = v;
        }
        false
    }

    /// Step 4.
    fn local_search(&mut self) {
        let t_end = self.m.hours;
        let units = self.m.commit_units.clone();
        loop {
            let mut improved = false;
            for &u in &units {
                let mut k = 0;
                loop {
                    let bl = blocks(&self.on, u);
                    if k >= bl.len() || self.budget == 0 {
                        break;
                    }
                    let (s, e) = bl[k];
                    let col: Vec<bool> = self.on.iter().map(|r| r[u]).collect();
                    let mut moves: Vec<Vec<bool>> = Vec::new();
                    let edit = |f: &dyn Fn(&mut Vec<bool>)| {
                        let mut c = col.clone();
                        f(&mut c);
                        c
                    };
                    // Drop the block.
                    moves.push(edit(&|c| c[s..=e].iter_mut().for_each(|x| *x = false)));
                    // Fill the gap to the next block.
                    if let Some(&(s2, _)) = bl.get(k + 1) {
                        moves.push(edit(&|c| c[e + 1..s2].iter_mut().for_each(|x| *x = true)));
                    }
                    if e > s {
                        moves.push(edit(&|c| c[s] = false));
                        moves.push(edit(&|c| c[e] = false));
                    }
                    if s > 0 {
                        moves.push(edit(&|c| c[s - 1] = true));
                    }
                    if e + 1 < t_end {
                        moves.push(edit(&|c| c[e + 1] = true));
                    }
                    let mut moved = false;
                    for mv in moves {
                        if self.try_column(u, &mv) {
                            moved = true;
                            improved = true;
                            break;
                        }
                    }
                    if !moved {
                        k += 1;
                    }
                }
            }
            if !improved || self.budget == 0 {
                break;
            }
        }
    }
}

/// Exhaustive search over every commitment schedule.
fn enumerate(m: &Model) -> Option<Plan> {
    let n = m.commit_units.len();
    let t_end = m.hours;
    let bits = n * t_end;
    let nu = m.units.len();
    let coupled = m.ramps_can_bind();
    let mut hour_cache: HashMap<(usize, u64), Option<EdOutcome>> = HashMap::new();
    let mut best: Option<Plan> = None;

    for mask in 0u64..(1u64 << bits) {
        let on: Vec<Vec<bool>> = (0..t_end)
            .map(|t| {
                let mut row = vec![false; nu];
                for (j, &u) in m.commit_units.iter().enumerate() {
                    row[u] = mask >> (t * n + j) & 1 == 1;
                }
                row
            })
            .collect();
        if !m.commit_units.iter().all(|&u| min_times_ok(m, u, &on.iter().map(|r| r[u]).collect::<Vec<_>>())) {
            continue;
        }
        // Hour-separable dispatch, cached per hour pattern.
        let mut out = Vec::with_capacity(t_end);
        let mut feasible = true;
        for t in 0..t_end {
            let key = (t, (mask >> (t * n)) & ((1u64 << n) - 1));
            let o = hour_cache.entry(key).or_insert_with(|| dispatch_hour(m, t, &on[t], None).ok());
            match o {
                Some(o) => out.push(o.clone()),
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        if coupled {
            match dispatch_window(m, &on, 0, t_end, None) {
                Some(o) => out = o,
                None => continue,
            }
        }
        let cost = plan_cost(m, &on, &out);
        if best.as_ref().is_none_or(|b| cost < b.cost - 1e-9 * b.cost.abs().max(1.0)) {
            best = Some(Plan { on, out, cost });
        }
    }
    best
}

fn finalize(m: &Model, plan: &Plan) -> Vec<UcHour> {
    let nr = m.regions();
    let t_end = m.hours;
    (0..t_end)
        .map(|t| {
            let on = &plan.on[t];
            let out = &plan.out[t];
            let units: Vec<UnitState> = m
                .units
                .iter()
                .enumerate()
                .map(|(i, u)| match u.kind {
                    UnitKind::Thermal => UnitState { on: on[i], p: if on[i] { out.p[i] } else { 0.0 } },
                    UnitKind::SynCon => UnitState { on: on[i], p: 0.0 },
                    _ => UnitState { on: true, p: out.p[i] },
                })
                .collect();
            let mut regions = vec![RegionState::default(); nr];
            for (r, rs) in regions.iter_mut().enumerate() {
                rs.net_demand = m.demand[t][r];
            }
            for (i, u) in m.units.iter().enumerate() {
                if on[i] && u.commitable() {
                    regions[u.region].inertia += u.stored;
                    if u.kind == UnitKind::Thermal {
                        regions[u.region].reserve += u.cap - units[i].p;
                    }
                }
            }
            let binding = binding_tags(m, plan, t, &units);
            UcHour {
                hour: m.start + t,
                units,
                regions,
                tie_flows: out.flows.clone(),
                curtailed_ns: out.curtailed.clone(),
                binding,
            }
        })
        .collect()
}

fn binding_tags(m: &Model, plan: &Plan, t: usize, units: &[UnitState]) -> Vec<BindingTag> {
    let out = &plan.out[t];
    let mut tags = Vec::new();
    for r in 0..m.regions() {
        let marginal = m
            .merit
            .iter()
            .filter(|&&u| m.units[u].region == r && units[u].on && units[u].p > m.units[u].lo + EPS)
            .map(|&u| m.units[u].srmc)
            .fold(f64::NEG_INFINITY, f64::max);
        for &u in &m.merit {
            let unit = &m.units[u];
            if unit.region != r || unit.srmc >= marginal {
                continue;
            }
            let reason = if !units[u].on {
                let mut k = t;
                while k > 0 && !plan.on[k - 1][u] {
                    k -= 1;
                }
                if k > 0 && t - k < unit.min_down {
                    BindingReason::MinDown
                } else {
                    BindingReason::CommitmentCost
                }
            } else if units[u].p < unit.cap - EPS {
                let (hi, lim) = out.upper[u];
                if units[u].p >= hi - EPS {
                    match lim {
                        Limit::Inertia => BindingReason::Inertia,
                        Limit::Ramp => BindingReason::Ramp,
                        Limit::Capacity => BindingReason::Ramp,
                    }
                } else if out.reserve_bound[r] {
                    BindingReason::Reserve
                } else {
                    BindingReason::Ramp
                }
            } else {
                continue;
            };
            tags.push(BindingTag { gen_id: m.ids[u].clone(), reason });
        }
    }
    tags
}
