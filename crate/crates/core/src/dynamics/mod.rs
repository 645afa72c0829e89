//! Multi-area frequency response after a contingency.
//!
//! Each region is one aggregated swing equation in deviation form,
//!
//! ```text
//! (2·I_r/f0)·dΔf_r/dt = ΔP_gov,r + ΔP_dev,r − ΔP_load,r(Δf_r) − step_r(t) − Σ_j ΔP_tie,rj
//! ```
//!
//! with governor fleets as first-order lags clamped to their headroom,
//! frequency-dependent load (a static part plus an optional lagged
//! induction-motor part), tie lines `dΔP_rj/dt = 2π·K·(Δf_r − Δf_j)` and the
//! fast-frequency devices of [`Device`]. Integration is explicit RK4 on a
//! fixed step.

mod devices;
mod sim;

pub use devices::{
    dl_power, governor_power, ie_power, DeloadedWf, Device, GovernorFleet, IePhase, IeState, InertiaEmulation,
};
pub use sim::{simulate, write_trace_csv, FrequencyTrace, SimOptions, TRACE_CSV_HEADER};

use crate::dispatch::{regional_inertia, Network, UcHour};
use crate::region::RegionId;
use crate::scenario::GeneratorSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("region {0} has no inertia but hosts the contingency")]
    SingularRegion(RegionId),
    #[error("state became non-finite at t = {t:.3} s")]
    NonFiniteState { t: f64 },
    #[error("unknown region {0}")]
    UnknownRegion(RegionId),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LoadKind {
    Static,
    Dynamic,
}

/// Frequency sensitivity of demand. Damping values are normalised: 1.0
/// means 1 % load change per 1 % frequency change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadModel {
    pub kind: LoadKind,
    pub d_static: f64,
    /// Share of load that is induction motors.
    pub im_fraction: f64,
    /// s
    pub im_time_const: f64,
    pub im_damping: f64,
}

impl LoadModel {
    pub fn new(kind: LoadKind) -> Self {
        LoadModel {
            kind,
            d_static: 1.0,
            im_fraction: if kind == LoadKind::Dynamic { 0.4 } else { 0.0 },
            im_time_const: 0.1,
            im_damping: 2.0,
        }
    }

    /// No frequency dependence at all.
    pub fn rigid() -> Self {
        LoadModel { d_static: 0.0, ..LoadModel::new(LoadKind::Static) }
    }

    /// Steady-state damping of `load` MW, in MW/Hz.
    pub fn effective_damping(&self, load: f64, f0: f64) -> f64 {
        load / f0 * ((1.0 - self.im_fraction) * self.d_static + self.im_fraction * self.im_damping)
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        let vals = [self.d_static, self.im_fraction, self.im_time_const, self.im_damping];
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) || self.im_fraction > 1.0 {
            return Err(DynamicsError::InvalidParameter("load model values must be finite, ≥ 0".into()));
        }
        if self.im_fraction > 0.0 && self.im_time_const <= 0.0 {
            return Err(DynamicsError::InvalidParameter("induction-motor time constant must be > 0".into()));
        }
        Ok(())
    }
}

impl Default for LoadModel {
    fn default() -> Self {
        LoadModel::new(LoadKind::Dynamic)
    }
}

/// A device attached to a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedDevice {
    pub region: RegionId,
    pub device: Device,
}

/// One governor-equipped unit's share of a fleet; used to take a tripped
/// unit out of the response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetMember {
    pub fleet: usize,
    pub rating: f64,
    pub headroom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDyn {
    pub id: RegionId,
    /// MW·s
    pub inertia: f64,
    /// MW
    pub load: f64,
    pub load_model: LoadModel,
    pub governors: Vec<GovernorFleet>,
    /// Active devices; synchronous condensers are already in `inertia`.
    pub devices: Vec<Device>,
    pub members: BTreeMap<String, FleetMember>,
}

impl RegionDyn {
    /// A region with inertia and load only.
    pub fn bare(id: impl Into<RegionId>, inertia: f64, load: f64, load_model: LoadModel) -> Self {
        RegionDyn {
            id: id.into(),
            inertia,
            load,
            load_model,
            governors: vec![],
            devices: vec![],
            members: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynLine {
    pub from: usize,
    pub to: usize,
    /// MW/rad
    pub sync_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynModel {
    pub f0: f64,
    pub regions: Vec<RegionDyn>,
    pub lines: Vec<DynLine>,
}

impl DynModel {
    pub fn region_index(&self, r: &RegionId) -> Option<usize> {
        self.regions.iter().position(|x| &x.id == r)
    }

    /// Σ regional inertia, MW·s.
    pub fn total_inertia(&self) -> f64 {
        self.regions.iter().map(|r| r.inertia).sum()
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.f0 > 0.0) {
            return Err(DynamicsError::InvalidParameter("f0 must be > 0".into()));
        }
        for r in &self.regions {
            if !(r.inertia >= 0.0 && r.inertia.is_finite() && r.load >= 0.0 && r.load.is_finite()) {
                return Err(DynamicsError::InvalidParameter(format!("region {}: inertia and load must be ≥ 0", r.id)));
            }
            r.load_model.validate()?;
            for g in &r.governors {
                let vals = [g.rating, g.droop, g.headroom];
                if vals.iter().any(|v| v.is_nan() || *v < 0.0) || !(g.time_const > 0.0) {
                    return Err(DynamicsError::InvalidParameter(format!("region {}: bad governor fleet", r.id)));
                }
            }
            if let Some(d) = r.devices.iter().find(|d| !d.validate()) {
                return Err(DynamicsError::InvalidParameter(format!("region {}: bad device {d:?}", r.id)));
            }
        }
        for l in &self.lines {
            if l.from >= self.regions.len() || l.to >= self.regions.len() || !(l.sync_coeff >= 0.0) {
                return Err(DynamicsError::InvalidParameter("bad tie line".into()));
            }
        }
        Ok(())
    }
}

/// Assembles the dynamic model of one dispatch hour. Governor fleets group
/// committed units by (droop, time constant); headroom is capacity minus
/// dispatch. Synchronous condensers fold into regional inertia; other
/// devices are attached to their region.
pub fn build_multi_area_model(
    uc: &UcHour,
    portfolio: &[GeneratorSpec],
    net: &Network,
    load_model: &LoadModel,
    devices: &[PlacedDevice],
    f0: f64,
) -> Result<DynModel, DynamicsError> {
    if uc.units.len() != portfolio.len() {
        return Err(DynamicsError::InvalidParameter("dispatch hour does not match the portfolio".into()));
    }
    let mut regions: Vec<RegionDyn> = net
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let load = uc.regions.get(i).map_or(0.0, |s| s.net_demand);
            RegionDyn::bare(r.clone(), regional_inertia(uc, portfolio, r), load, load_model.clone())
        })
        .collect();

    for (g, u) in portfolio.iter().zip(&uc.units) {
        let (Some(droop), true) = (g.droop, u.on && g.is_synchronous()) else { continue };
        let r = net.region_index(&g.region).ok_or_else(|| DynamicsError::UnknownRegion(g.region.clone()))?;
        let region = &mut regions[r];
        let fleet = match region
            .governors
            .iter()
            .position(|f| f.droop == droop && f.time_const == g.gov_time_const)
        {
            Some(k) => k,
            None => {
                region.governors.push(GovernorFleet { rating: 0.0, droop, time_const: g.gov_time_const, headroom: 0.0 });
                region.governors.len() - 1
            }
        };
        let headroom = (g.capacity - u.p).max(0.0);
        region.governors[fleet].rating += g.capacity;
        region.governors[fleet].headroom += headroom;
        region.members.insert(g.id.clone(), FleetMember { fleet, rating: g.capacity, headroom });
    }

    for d in devices {
        let r = net.region_index(&d.region).ok_or_else(|| DynamicsError::UnknownRegion(d.region.clone()))?;
        if !d.device.validate() {
            return Err(DynamicsError::InvalidParameter(format!("bad device {:?}", d.device)));
        }
        match &d.device {
            Device::SynCon { rating, h } => regions[r].inertia += rating * h,
            other => regions[r].devices.push(other.clone()),
        }
    }

    let ends = net.line_ends();
    let lines =
        ends.iter().zip(&net.lines).map(|(&(a, b), l)| DynLine { from: a, to: b, sync_coeff: l.sync_coeff }).collect();
    let model = DynModel { f0, regions, lines };
    model.validate()?;
    Ok(model)
}

/// One synchronous condenser per region.
pub fn syncon_roster(regions: &[RegionId], rating: f64, h: f64) -> Vec<PlacedDevice> {
    regions.iter().map(|r| PlacedDevice { region: r.clone(), device: Device::SynCon { rating, h } }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{RegionState, UnitState};
    use crate::region::nem_regions;
    use crate::scenario::Tech;

    fn one_unit_per_region() -> (UcHour, Vec<GeneratorSpec>) {
        let portfolio: Vec<GeneratorSpec> =
            nem_regions().iter().map(|r| GeneratorSpec::new(format!("U_{r}"), r.clone(), Tech::Coal, 500.0)).collect();
        let uc = UcHour {
            hour: 0,
            units: vec![UnitState { on: true, p: 400.0 }; 4],
            regions: vec![RegionState { reserve: 100.0, inertia: 3000.0, net_demand: 400.0 }; 4],
            tie_flows: vec![0.0; 3],
            curtailed_ns: vec![0.0; 4],
            binding: vec![],
        };
        (uc, portfolio)
    }

    #[test]
    fn regional_inertia_from_dispatch() {
        let (uc, p) = one_unit_per_region();
        let m = build_multi_area_model(&uc, &p, &Network::nem(), &LoadModel::default(), &[], 50.0).unwrap();
        for r in &m.regions {
            assert_eq!(r.inertia, 3000.0);
            assert_eq!(r.governors.len(), 1);
            assert_eq!(r.governors[0].headroom, 100.0);
            assert_eq!(r.governors[0].rating, 500.0);
        }
        assert_eq!(m.lines.len(), 3);
    }

    #[test]
    fn syncons_add_nine_point_six_gws() {
        let (uc, p) = one_unit_per_region();
        let net = Network::nem();
        let base = build_multi_area_model(&uc, &p, &net, &LoadModel::default(), &[], 50.0).unwrap();
        let sc = syncon_roster(&net.regions, 400.0, 6.0);
        let with = build_multi_area_model(&uc, &p, &net, &LoadModel::default(), &sc, 50.0).unwrap();
        for (a, b) in base.regions.iter().zip(&with.regions) {
            assert_eq!(b.inertia - a.inertia, 2400.0);
            assert!(b.devices.is_empty());
        }
        assert_eq!(with.total_inertia() - base.total_inertia(), 9600.0);
    }

    #[test]
    fn unknown_device_region_is_rejected() {
        let (uc, p) = one_unit_per_region();
        let dev = [PlacedDevice { region: "TAS".into(), device: Device::DeloadedWf(DeloadedWf::default()) }];
        assert_eq!(
            build_multi_area_model(&uc, &p, &Network::nem(), &LoadModel::default(), &dev, 50.0),
            Err(DynamicsError::UnknownRegion("TAS".into()))
        );
    }

    #[test]
    fn dynamic_load_damps_at_least_as_much_as_static() {
        let s = LoadModel::new(LoadKind::Static).effective_damping(1000.0, 50.0);
        let d = LoadModel::new(LoadKind::Dynamic).effective_damping(1000.0, 50.0);
        assert_eq!(s, 20.0);
        assert!(d >= s);
    }
}
