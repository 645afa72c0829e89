//! Governor fleets and fast-frequency devices.

use serde::{Deserialize, Serialize};

/// Aggregate of committed governor-equipped machines sharing droop and
/// time constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GovernorFleet {
    /// MW
    pub rating: f64,
    /// Per unit.
    pub droop: f64,
    /// s
    pub time_const: f64,
    /// Spare capacity, MW.
    pub headroom: f64,
}

impl GovernorFleet {
    /// Steady-state output the lag is heading for at deviation `df`.
    pub fn target(&self, df: f64, f0: f64) -> f64 {
        if self.droop <= 0.0 {
            return 0.0;
        }
        (-df / self.droop * self.rating / f0).clamp(0.0, self.headroom.max(0.0))
    }
}

/// Output of a fleet whose lag state is `state`.
pub fn governor_power(fleet: &GovernorFleet, _df: f64, state: f64) -> f64 {
    state.clamp(0.0, fleet.headroom.max(0.0))
}

/// Time derivative of the fleet's lag state.
pub(crate) fn governor_rate(fleet: &GovernorFleet, df: f64, state: f64, f0: f64) -> f64 {
    (fleet.target(df, f0) - state) / fleet.time_const
}

/// Inertia emulation on a wind farm: injection proportional to the falling
/// (filtered) frequency slope, paid back from the grid afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InertiaEmulation {
    /// MW per Hz/s
    pub k_ie: f64,
    /// Time constant of the slope filter, s.
    pub washout_tc: f64,
    /// MW
    pub p_max: f64,
    /// Extractable rotor energy, MW·s.
    pub ke_budget: f64,
    /// MW drawn while the rotors re-accelerate.
    pub recovery_power: f64,
    /// Fraction of the budget after which support stops.
    pub recovery_trigger: f64,
}

impl Default for InertiaEmulation {
    /// A 600 MW farm emulating H = 3.5 s.
    fn default() -> Self {
        InertiaEmulation {
            k_ie: 2.0 * 3.5 * 600.0 / 50.0,
            washout_tc: 0.5,
            p_max: 60.0,
            ke_budget: 420.0,
            recovery_power: 30.0,
            recovery_trigger: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IePhase {
    Support,
    Recovery,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IeState {
    pub phase: IePhase,
    /// Energy injected during support, MW·s.
    pub injected: f64,
    /// Energy drawn back so far, MW·s.
    pub recovered: f64,
}

impl Default for IeState {
    fn default() -> Self {
        IeState { phase: IePhase::Support, injected: 0.0, recovered: 0.0 }
    }
}

impl IeState {
    /// Phase transition at a step boundary. Support ends once the budget
    /// share is spent or the injection has died away after the event;
    /// recovery ends when the injected energy has been drawn back.
    pub fn advance(&mut self, dev: &InertiaEmulation, filtered_dfdt: f64) {
        match self.phase {
            IePhase::Support => {
                let spent = self.injected >= dev.ke_budget * dev.recovery_trigger;
                let faded = self.injected > 0.0 && support_power(dev, filtered_dfdt) <= 0.0;
                if spent || faded {
                    self.phase = IePhase::Recovery;
                }
            }
            IePhase::Recovery if self.recovered >= self.injected - 1e-12 => self.phase = IePhase::Done,
            _ => {}
        }
    }

    /// Recovery draw for a step of length `dt`, trimmed so the last step
    /// returns exactly the outstanding energy.
    pub fn recovery_draw(&self, dev: &InertiaEmulation, dt: f64) -> f64 {
        let owed = (self.injected - self.recovered).max(0.0);
        dev.recovery_power.min(owed / dt)
    }
}

fn support_power(dev: &InertiaEmulation, filtered_dfdt: f64) -> f64 {
    (-dev.k_ie * filtered_dfdt).clamp(0.0, dev.p_max)
}

/// IE injection in MW (negative while recovering).
pub fn ie_power(dev: &InertiaEmulation, filtered_dfdt: f64, state: &IeState) -> f64 {
    match state.phase {
        IePhase::Support => support_power(dev, filtered_dfdt),
        IePhase::Recovery => -dev.recovery_power,
        IePhase::Done => 0.0,
    }
}

/// A wind farm held below its available power, releasing the margin
/// through a droop-like control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeloadedWf {
    /// MW
    pub available: f64,
    pub deload_frac: f64,
    /// MW/Hz
    pub droop_gain: f64,
}

impl Default for DeloadedWf {
    fn default() -> Self {
        DeloadedWf { available: 600.0, deload_frac: 0.05, droop_gain: 300.0 }
    }
}

impl DeloadedWf {
    pub fn headroom(&self) -> f64 {
        self.deload_frac * self.available
    }

    pub fn pre_event_output(&self) -> f64 {
        self.available - self.headroom()
    }
}

/// Under-frequency release of the de-loaded margin, MW.
pub fn dl_power(dev: &DeloadedWf, df: f64) -> f64 {
    (dev.droop_gain * (-df).max(0.0)).clamp(0.0, dev.headroom())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Device {
    /// MVA and s; adds rating·h of inertia, nothing else.
    SynCon { rating: f64, h: f64 },
    InertiaEmulation(InertiaEmulation),
    DeloadedWf(DeloadedWf),
}

impl Device {
    pub fn validate(&self) -> bool {
        let ok = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        match self {
            Device::SynCon { rating, h } => ok(&[*rating, *h]),
            Device::InertiaEmulation(d) => {
                ok(&[d.k_ie, d.p_max, d.ke_budget, d.recovery_power, d.recovery_trigger]) && d.washout_tc > 0.0
            }
            Device::DeloadedWf(d) => ok(&[d.available, d.droop_gain]) && (0.0..=1.0).contains(&d.deload_frac),
        }
    }
}
