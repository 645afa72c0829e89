use super::devices::{dl_power, governor_power, governor_rate, DeloadedWf, IePhase, IeState, InertiaEmulation};
use super::{Device, DynModel, DynamicsError, GovernorFleet};
use crate::contingency::ContingencyCase;
use crate::region::RegionId;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{self, Write};

/// Regions without synchronous machines get this much inertia so their
/// swing equation stays well posed; they never host the event.
const INERTIA_FLOOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    /// s
    pub event_time: f64,
    /// Window of the RoCoF stored with the trace, s.
    pub rocof_window: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { duration: 50.0, dt: 0.01, event_time: 1.0, rocof_window: 0.5 }
    }
}

/// Sampled response, one series per region; sample `k` is at `k·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrace {
    pub dt: f64,
    pub duration: f64,
    pub event_time: f64,
    pub f0: f64,
    pub regions: Vec<RegionId>,
    /// Hz
    pub f: Vec<Vec<f64>>,
    /// Trailing-window RoCoF, Hz/s.
    pub rocof: Vec<Vec<f64>>,
    /// MW
    pub p_gov: Vec<Vec<f64>>,
    /// MW
    pub p_dev: Vec<Vec<f64>>,
    /// Final state of each inertia-emulation device, in region order.
    pub ie_states: Vec<IeState>,
}

impl FrequencyTrace {
    pub fn region_index(&self, r: &RegionId) -> Option<usize> {
        self.regions.iter().position(|x| x == r)
    }

    pub fn samples(&self) -> usize {
        self.f.first().map_or(0, Vec::len)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn event_index(&self) -> usize {
        (self.event_time / self.dt).round() as usize
    }

    /// A trace from given frequency samples (no power series).
    pub fn from_samples(regions: Vec<RegionId>, f: Vec<Vec<f64>>, dt: f64, event_time: f64, f0: f64) -> Self {
        let n = f.first().map_or(0, Vec::len);
        let rocof = f.iter().map(|s| trailing_rocof(s, dt, 0.5)).collect();
        let zeros = vec![vec![0.0; n]; f.len()];
        FrequencyTrace {
            dt,
            duration: n.saturating_sub(1) as f64 * dt,
            event_time,
            f0,
            regions,
            f,
            rocof,
            p_gov: zeros.clone(),
            p_dev: zeros,
            ie_states: vec![],
        }
    }

    /// Inertia-weighted mean frequency.
    pub fn centre_of_inertia(&self, inertia: &[f64]) -> Vec<f64> {
        let total: f64 = inertia.iter().sum();
        (0..self.samples())
            .map(|k| self.f.iter().zip(inertia).map(|(s, i)| s[k] * i).sum::<f64>() / total)
            .collect()
    }
}

fn trailing_rocof(f: &[f64], dt: f64, window: f64) -> Vec<f64> {
    let w = ((window / dt).round() as usize).max(1);
    let span = w as f64 * dt;
    (0..f.len()).map(|k| (f[k] - f[k.saturating_sub(w)]) / span).collect()
}

struct Rhs<'a> {
    n: usize,
    f0: f64,
    /// f0 / (2·I_r)
    m: Vec<f64>,
    d_static: Vec<f64>,
    k_im: Vec<f64>,
    t_im: Vec<f64>,
    lines: Vec<(usize, usize, f64)>,
    govs: Vec<(usize, GovernorFleet)>,
    ies: Vec<(usize, &'a InertiaEmulation)>,
    dls: Vec<(usize, &'a DeloadedWf)>,
    event_region: usize,
    size: f64,
    // state offsets
    tie0: usize,
    im0: usize,
    gov0: usize,
    ie0: usize,
}

impl Rhs<'_> {
    fn ie_output(&self, k: usize, x: &[f64], phase: IePhase, draw: f64) -> f64 {
        let (r, dev) = self.ies[k];
        let y = x[self.ie0 + 3 * k];
        let slope = (x[r] - y) / dev.washout_tc;
        match phase {
            IePhase::Support => (-dev.k_ie * slope).clamp(0.0, dev.p_max),
            IePhase::Recovery => -draw,
            IePhase::Done => 0.0,
        }
    }

    fn device_power(&self, x: &[f64], phases: &[IeState], draws: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..self.ies.len() {
            out[self.ies[k].0] += self.ie_output(k, x, phases[k].phase, draws[k]);
        }
        for &(r, dev) in &self.dls {
            out[r] += dl_power(dev, x[r]);
        }
    }

    fn eval(&self, x: &[f64], dx: &mut [f64], event: bool, phases: &[IeState], draws: &[f64], acc: &mut [f64]) {
        let n = self.n;
        // acc[r]: power surplus of region r.
        for r in 0..n {
            acc[r] = -self.d_static[r] * x[r] - x[self.im0 + r];
            dx[self.im0 + r] = if self.t_im[r] > 0.0 { (self.k_im[r] * x[r] - x[self.im0 + r]) / self.t_im[r] } else { 0.0 };
        }
        if event {
            acc[self.event_region] -= self.size;
        }
        for (l, &(a, b, k)) in self.lines.iter().enumerate() {
            let p = x[self.tie0 + l];
            acc[a] -= p;
            acc[b] += p;
            dx[self.tie0 + l] = TAU * k * (x[a] - x[b]);
        }
        for (g, (r, fleet)) in self.govs.iter().enumerate() {
            let s = x[self.gov0 + g];
            acc[*r] += governor_power(fleet, x[*r], s);
            dx[self.gov0 + g] = governor_rate(fleet, x[*r], s, self.f0);
        }
        for k in 0..self.ies.len() {
            let (r, dev) = self.ies[k];
            let base = self.ie0 + 3 * k;
            let p = self.ie_output(k, x, phases[k].phase, draws[k]);
            acc[r] += p;
            dx[base] = (x[r] - x[base]) / dev.washout_tc;
            dx[base + 1] = if phases[k].phase == IePhase::Support { p } else { 0.0 };
            dx[base + 2] = if phases[k].phase == IePhase::Recovery { -p } else { 0.0 };
        }
        for &(r, dev) in &self.dls {
            acc[r] += dl_power(dev, x[r]);
        }
        for r in 0..n {
            dx[r] = self.m[r] * acc[r];
        }
    }
}

/// Integrates the model for `opts.duration` seconds with the contingency
/// applied from `opts.event_time`. A variable contingency also takes the
/// tripped unit out of its governor fleet; a fixed one removes its stated
/// inertia.
pub fn simulate(model: &DynModel, cc: &ContingencyCase, opts: &SimOptions) -> Result<FrequencyTrace, DynamicsError> {
    model.validate()?;
    if !(opts.dt > 0.0 && opts.duration > 0.0 && opts.event_time >= 0.0 && opts.rocof_window > 0.0) {
        return Err(DynamicsError::InvalidParameter("time settings must be positive".into()));
    }
    if !(cc.size >= 0.0 && cc.size.is_finite()) {
        return Err(DynamicsError::InvalidParameter(format!("contingency size {}", cc.size)));
    }
    let ev = model.region_index(&cc.region).ok_or_else(|| DynamicsError::UnknownRegion(cc.region.clone()))?;
    let n = model.regions.len();
    let f0 = model.f0;

    let mut inertia: Vec<f64> = model.regions.iter().map(|r| r.inertia).collect();
    inertia[ev] = (inertia[ev] - cc.inertia_removed).max(0.0);
    if cc.size > 0.0 && inertia[ev] <= 0.0 {
        return Err(DynamicsError::SingularRegion(cc.region.clone()));
    }
    for (r, i) in inertia.iter_mut().enumerate() {
        if *i < INERTIA_FLOOR {
            log::debug!("region {} inertia {:.1} MW·s raised to the floor", model.regions[r].id, *i);
            *i = INERTIA_FLOOR;
        }
    }

    let mut govs = Vec::new();
    for (r, region) in model.regions.iter().enumerate() {
        let mut fleets = region.governors.clone();
        if let Some(m) = cc.tripped_unit.as_ref().and_then(|id| region.members.get(id)) {
            fleets[m.fleet].rating = (fleets[m.fleet].rating - m.rating).max(0.0);
            fleets[m.fleet].headroom = (fleets[m.fleet].headroom - m.headroom).max(0.0);
        }
        govs.extend(fleets.into_iter().map(|f| (r, f)));
    }
    let mut ies = Vec::new();
    let mut dls = Vec::new();
    for (r, region) in model.regions.iter().enumerate() {
        for d in &region.devices {
            match d {
                Device::InertiaEmulation(ie) => ies.push((r, ie)),
                Device::DeloadedWf(dl) => dls.push((r, dl)),
                Device::SynCon { .. } => {}
            }
        }
    }

    let tie0 = n;
    let im0 = tie0 + model.lines.len();
    let gov0 = im0 + n;
    let ie0 = gov0 + govs.len();
    let len = ie0 + 3 * ies.len();
    let rhs = Rhs {
        n,
        f0,
        m: inertia.iter().map(|i| f0 / (2.0 * i)).collect(),
        d_static: model
            .regions
            .iter()
            .map(|r| r.load_model.d_static * (1.0 - r.load_model.im_fraction) * r.load / f0)
            .collect(),
        k_im: model.regions.iter().map(|r| r.load_model.im_damping * r.load_model.im_fraction * r.load / f0).collect(),
        t_im: model
            .regions
            .iter()
            .map(|r| if r.load_model.im_fraction > 0.0 { r.load_model.im_time_const } else { 0.0 })
            .collect(),
        lines: model.lines.iter().map(|l| (l.from, l.to, l.sync_coeff)).collect(),
        govs,
        ies,
        dls,
        event_region: ev,
        size: cc.size,
        tie0,
        im0,
        gov0,
        ie0,
    };

    let dt = opts.dt;
    let steps = (opts.duration / dt).round() as usize;
    let event_step = (opts.event_time / dt).round() as usize;
    let mut x = vec![0.0; len];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut acc = vec![0.0; n];
    let mut phases = vec![IeState::default(); rhs.ies.len()];
    let mut draws = vec![0.0; rhs.ies.len()];

    let mut f = vec![Vec::with_capacity(steps + 1); n];
    let mut p_gov = vec![Vec::with_capacity(steps + 1); n];
    let mut p_dev = vec![Vec::with_capacity(steps + 1); n];
    let mut dev_buf = vec![0.0; n];
    let record = |x: &[f64], phases: &[IeState], draws: &[f64], f: &mut Vec<Vec<f64>>, pg: &mut Vec<Vec<f64>>, pd: &mut Vec<Vec<f64>>, dev_buf: &mut [f64]| {
        rhs.device_power(x, phases, draws, dev_buf);
        let mut gov = vec![0.0; n];
        for (g, (r, fleet)) in rhs.govs.iter().enumerate() {
            gov[*r] += governor_power(fleet, x[*r], x[rhs.gov0 + g]);
        }
        for r in 0..n {
            f[r].push(f0 + x[r]);
            pg[r].push(gov[r]);
            pd[r].push(dev_buf[r]);
        }
    };
    record(&x, &phases, &draws, &mut f, &mut p_gov, &mut p_dev, &mut dev_buf);

    for k in 0..steps {
        for (i, s) in phases.iter_mut().enumerate() {
            let (r, dev) = rhs.ies[i];
            let base = rhs.ie0 + 3 * i;
            s.injected = x[base + 1];
            s.recovered = x[base + 2];
            s.advance(dev, (x[r] - x[base]) / dev.washout_tc);
            draws[i] = if s.phase == IePhase::Recovery { s.recovery_draw(dev, dt) } else { 0.0 };
        }
        let event = k >= event_step;
        rhs.eval(&x, &mut k1, event, &phases, &draws, &mut acc);
        for i in 0..len {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        rhs.eval(&tmp, &mut k2, event, &phases, &draws, &mut acc);
        for i in 0..len {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        rhs.eval(&tmp, &mut k3, event, &phases, &draws, &mut acc);
        for i in 0..len {
            tmp[i] = x[i] + dt * k3[i];
        }
        rhs.eval(&tmp, &mut k4, event, &phases, &draws, &mut acc);
        for i in 0..len {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::NonFiniteState { t: (k + 1) as f64 * dt });
        }
        record(&x, &phases, &draws, &mut f, &mut p_gov, &mut p_dev, &mut dev_buf);
    }
    for (i, s) in phases.iter_mut().enumerate() {
        let base = rhs.ie0 + 3 * i;
        s.injected = x[base + 1];
        s.recovered = x[base + 2];
        if s.phase == IePhase::Recovery && s.recovered >= s.injected - 1e-12 {
            s.phase = IePhase::Done;
        }
    }

    let rocof = f.iter().map(|s| trailing_rocof(s, dt, opts.rocof_window)).collect();
    Ok(FrequencyTrace {
        dt,
        duration: steps as f64 * dt,
        event_time: event_step as f64 * dt,
        f0,
        regions: model.regions.iter().map(|r| r.id.clone()).collect(),
        f,
        rocof,
        p_gov,
        p_dev,
        ie_states: phases,
    })
}

pub const TRACE_CSV_HEADER: &str = "t_s,region,f_hz,rocof_hz_per_s,p_gov_mw,p_dev_mw";

pub fn write_trace_csv<W: Write>(mut out: W, trace: &FrequencyTrace) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for k in 0..trace.samples() {
        let t = trace.time(k);
        for (r, id) in trace.regions.iter().enumerate() {
            writeln!(
                out,
                "{t:.4},{id},{},{},{},{}",
                trace.f[r][k], trace.rocof[r][k], trace.p_gov[r][k], trace.p_dev[r][k]
            )?;
        }
    }
    Ok(())
}
