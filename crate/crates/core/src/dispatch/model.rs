//! Flattened, index-based view of a dispatch instance.

use super::{DispatchError, InertiaConstraint, Network, UcOptions};
use crate::region::RegionId;
use crate::scenario::{RegionTrace, Scenario, Tech};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum UnitKind {
    /// Energy-producing synchronous unit.
    Thermal,
    SynCon,
    Wind,
    Solar,
}

#[derive(Debug, Clone)]
pub(crate) struct Unit {
    pub region: usize,
    pub kind: UnitKind,
    pub cap: f64,
    /// Minimum stable output, MW.
    pub lo: f64,
    pub ramp: f64,
    pub srmc: f64,
    pub fixed: f64,
    pub startup: f64,
    pub shutdown: f64,
    pub min_up: usize,
    pub min_down: usize,
    /// H·S, MW·s.
    pub stored: f64,
}

impl Unit {
    pub fn commitable(&self) -> bool {
        matches!(self.kind, UnitKind::Thermal | UnitKind::SynCon)
    }
}

pub(crate) struct Model {
    pub units: Vec<Unit>,
    pub ids: Vec<String>,
    pub region_ids: Vec<RegionId>,
    pub lines: Vec<(usize, usize, f64)>,
    /// Absolute index of the first hour.
    pub start: usize,
    pub hours: usize,
    /// `[t][r]`
    pub demand: Vec<Vec<f64>>,
    wind_cf: Vec<Vec<f64>>,
    solar_cf: Vec<Vec<f64>>,
    pub reserve_fraction: f64,
    pub inertia: bool,
    pub f0: f64,
    pub rocof_crit: f64,
    /// Thermal units by (srmc, index).
    pub merit: Vec<usize>,
    /// Units with an on/off decision (thermal and SynCon).
    pub commit_units: Vec<usize>,
    /// Per region, NS units.
    pub ns_units: Vec<Vec<usize>>,
}

impl Model {
    pub fn build(scenario: &Scenario, net: &Network, opts: &UcOptions) -> Result<Model, DispatchError> {
        net.validate()?;
        scenario.validate()?;
        let traces = &scenario.traces;
        let (start, end) = opts.horizon.unwrap_or((0, traces.hours()));
        if start >= end || end > traces.hours() {
            return Err(DispatchError::HorizonOutOfRange { start, end, hours: traces.hours() });
        }
        if !(opts.rocof_crit > 0.0 && opts.f0 > 0.0) {
            return Err(DispatchError::NonPositiveInput);
        }
        let nr = net.regions.len();
        let mut trace_idx = Vec::with_capacity(nr);
        for r in &net.regions {
            let i = traces
                .region_index(r)
                .ok_or_else(|| DispatchError::InvalidNetwork(format!("no traces for region {r}")))?;
            trace_idx.push(i);
        }
        for r in traces.regions() {
            if net.region_index(r).is_none() {
                return Err(DispatchError::InvalidNetwork(format!("traces region {r} is not in the network")));
            }
        }
        let mut units = Vec::with_capacity(scenario.portfolio.len());
        for g in &scenario.portfolio {
            let region = net
                .region_index(&g.region)
                .ok_or_else(|| DispatchError::InvalidNetwork(format!("generator {} in unknown region {}", g.id, g.region)))?;
            let kind = match g.tech {
                Tech::Wind => UnitKind::Wind,
                Tech::UtilityPv => UnitKind::Solar,
                Tech::SynCon => UnitKind::SynCon,
                _ => UnitKind::Thermal,
            };
            units.push(Unit {
                region,
                kind,
                cap: g.capacity,
                lo: if kind == UnitKind::Thermal { g.min_stable * g.capacity } else { 0.0 },
                ramp: g.ramp,
                srmc: g.srmc,
                fixed: g.fixed_cost,
                startup: g.startup_cost,
                shutdown: g.shutdown_cost,
                min_up: g.min_up.max(1) as usize,
                min_down: g.min_down.max(1) as usize,
                stored: g.stored_energy(),
            });
        }
        let hours = end - start;
        let tr = traces.traces();
        let col = |f: fn(&RegionTrace) -> &Vec<f64>| -> Vec<Vec<f64>> {
            (start..end).map(|h| trace_idx.iter().map(|&i| f(&tr[i])[h]).collect()).collect()
        };
        let demand = col(|t| &t.demand);
        let wind_cf = col(|t| &t.wind_cf);
        let solar_cf = col(|t| &t.solar_cf);

        let mut merit: Vec<usize> = (0..units.len()).filter(|&i| units[i].kind == UnitKind::Thermal).collect();
        merit.sort_by(|&a, &b| units[a].srmc.total_cmp(&units[b].srmc).then(a.cmp(&b)));
        let commit_units = (0..units.len()).filter(|&i| units[i].commitable()).collect();
        let mut ns_units = vec![Vec::new(); nr];
        for (i, u) in units.iter().enumerate() {
            if matches!(u.kind, UnitKind::Wind | UnitKind::Solar) {
                ns_units[u.region].push(i);
            }
        }
        let ends = net.line_ends();
        Ok(Model {
            ids: scenario.portfolio.iter().map(|g| g.id.clone()).collect(),
            units,
            region_ids: net.regions.clone(),
            lines: net.lines.iter().zip(ends).map(|(l, (a, b))| (a, b, l.limit)).collect(),
            start,
            hours,
            demand,
            wind_cf,
            solar_cf,
            reserve_fraction: opts.reserve_fraction.unwrap_or(scenario.reserve_fraction),
            inertia: opts.inertia_constraint == InertiaConstraint::Regional,
            f0: opts.f0,
            rocof_crit: opts.rocof_crit,
            merit,
            commit_units,
            ns_units,
        })
    }

    pub fn regions(&self) -> usize {
        self.region_ids.len()
    }

    /// Available output of an NS unit at relative hour `t`.
    pub fn ns_avail(&self, u: usize, t: usize) -> f64 {
        let unit = &self.units[u];
        match unit.kind {
            UnitKind::Wind => unit.cap * self.wind_cf[t][unit.region],
            UnitKind::Solar => unit.cap * self.solar_cf[t][unit.region],
            _ => 0.0,
        }
    }

    pub fn ns_avail_region(&self, r: usize, t: usize) -> f64 {
        self.ns_units[r].iter().map(|&u| self.ns_avail(u, t)).sum()
    }

    /// Whether some unit's ramp limit can ever bind.
    pub fn ramps_can_bind(&self) -> bool {
        self.units.iter().any(|u| u.kind == UnitKind::Thermal && u.ramp < u.cap - u.lo)
    }
}
