use super::ScenarioError;
use crate::region::RegionId;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tech {
    Hydro,
    Coal,
    #[serde(rename = "CCGT")]
    Ccgt,
    #[serde(rename = "OCGT")]
    Ocgt,
    /// Concentrated solar thermal with storage; modelled as a synchronous
    /// steam plant.
    #[serde(rename = "CSP")]
    Csp,
    Wind,
    #[serde(rename = "UtilityPV")]
    UtilityPv,
    SynCon,
}

impl Tech {
    pub fn is_synchronous(self) -> bool {
        !self.is_non_synchronous()
    }

    pub fn is_non_synchronous(self) -> bool {
        matches!(self, Tech::Wind | Tech::UtilityPv)
    }

    /// Synchronous machines that can be dispatched for energy.
    pub fn is_dispatchable_synchronous(self) -> bool {
        self.is_synchronous() && self != Tech::SynCon
    }

    pub fn name(self) -> &'static str {
        match self {
            Tech::Hydro => "Hydro",
            Tech::Coal => "Coal",
            Tech::Ccgt => "CCGT",
            Tech::Ocgt => "OCGT",
            Tech::Csp => "CSP",
            Tech::Wind => "Wind",
            Tech::UtilityPv => "UtilityPV",
            Tech::SynCon => "SynCon",
        }
    }

    pub fn defaults(self) -> TechDefaults {
        // Cost figures are per MW of unit capacity.
        let d = TechDefaults {
            inertia_const: 6.0,
            srmc: 0.0,
            fixed_cost_per_mw: 0.0,
            startup_cost_per_mw: 0.0,
            shutdown_cost_per_mw: 0.0,
            min_stable: 0.0,
            ramp_fraction: 1.0,
            min_up: 1,
            min_down: 1,
            droop: Some(0.05),
            gov_time_const: 0.5,
        };
        match self {
            Tech::Hydro => TechDefaults {
                inertia_const: 4.0,
                srmc: 55.0,
                fixed_cost_per_mw: 0.5,
                startup_cost_per_mw: 2.0,
                min_stable: 0.1,
                gov_time_const: 5.0,
                ..d
            },
            Tech::Coal => TechDefaults {
                srmc: 30.0,
                fixed_cost_per_mw: 2.0,
                startup_cost_per_mw: 40.0,
                shutdown_cost_per_mw: 5.0,
                min_stable: 0.4,
                ramp_fraction: 0.3,
                min_up: 8,
                min_down: 6,
                ..d
            },
            Tech::Ccgt => TechDefaults {
                srmc: 70.0,
                fixed_cost_per_mw: 1.5,
                startup_cost_per_mw: 15.0,
                shutdown_cost_per_mw: 2.0,
                min_stable: 0.5,
                ramp_fraction: 0.6,
                min_up: 4,
                min_down: 3,
                ..d
            },
            Tech::Ocgt => TechDefaults {
                srmc: 130.0,
                fixed_cost_per_mw: 0.5,
                startup_cost_per_mw: 3.0,
                min_stable: 0.2,
                ..d
            },
            Tech::Csp => TechDefaults {
                inertia_const: 4.0,
                srmc: 40.0,
                fixed_cost_per_mw: 1.0,
                startup_cost_per_mw: 5.0,
                min_stable: 0.25,
                ramp_fraction: 0.8,
                min_up: 2,
                min_down: 2,
                ..d
            },
            Tech::Wind | Tech::UtilityPv => TechDefaults {
                inertia_const: 0.0,
                droop: None,
                gov_time_const: 0.0,
                ..d
            },
            Tech::SynCon => TechDefaults {
                fixed_cost_per_mw: 0.2,
                startup_cost_per_mw: 0.5,
                droop: None,
                gov_time_const: 0.0,
                ..d
            },
        }
    }
}

/// Per-technology parameter defaults used by [`GeneratorSpec::new`].
#[derive(Debug, Clone, Copy)]
pub struct TechDefaults {
    pub inertia_const: f64,
    pub srmc: f64,
    pub fixed_cost_per_mw: f64,
    pub startup_cost_per_mw: f64,
    pub shutdown_cost_per_mw: f64,
    pub min_stable: f64,
    /// Ramp limit as a fraction of capacity per hour.
    pub ramp_fraction: f64,
    pub min_up: u32,
    pub min_down: u32,
    pub droop: Option<f64>,
    pub gov_time_const: f64,
}

/// One generating unit (or synchronous condenser).
///
/// The rated MVA used in inertia sums is taken as numerically equal to
/// `capacity` in MW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: String,
    pub region: RegionId,
    pub tech: Tech,
    /// MW
    pub capacity: f64,
    /// Inertia constant H, seconds.
    pub inertia_const: f64,
    /// $/MWh
    pub srmc: f64,
    /// $/h while committed
    pub fixed_cost: f64,
    pub startup_cost: f64,
    pub shutdown_cost: f64,
    /// Fraction of capacity.
    pub min_stable: f64,
    /// MW/h
    pub ramp: f64,
    pub min_up: u32,
    pub min_down: u32,
    /// Governor droop on unit base; `None` for units without a governor.
    pub droop: Option<f64>,
    /// Governor time constant, seconds.
    pub gov_time_const: f64,
}

impl GeneratorSpec {
    pub fn new(id: impl Into<String>, region: impl Into<RegionId>, tech: Tech, capacity: f64) -> Self {
        let d = tech.defaults();
        GeneratorSpec {
            id: id.into(),
            region: region.into(),
            tech,
            capacity,
            inertia_const: d.inertia_const,
            srmc: d.srmc,
            fixed_cost: d.fixed_cost_per_mw * capacity,
            startup_cost: d.startup_cost_per_mw * capacity,
            shutdown_cost: d.shutdown_cost_per_mw * capacity,
            min_stable: d.min_stable,
            ramp: d.ramp_fraction * capacity,
            min_up: d.min_up,
            min_down: d.min_down,
            droop: d.droop,
            gov_time_const: d.gov_time_const,
        }
    }

    pub fn with_srmc(mut self, srmc: f64) -> Self {
        self.srmc = srmc;
        self
    }

    pub fn is_synchronous(&self) -> bool {
        self.tech.is_synchronous()
    }

    /// H · S_B in MW·s.
    pub fn stored_energy(&self) -> f64 {
        if self.is_synchronous() {
            self.inertia_const * self.capacity
        } else {
            0.0
        }
    }

    pub fn min_output(&self) -> f64 {
        if self.tech.is_dispatchable_synchronous() {
            self.min_stable * self.capacity
        } else {
            0.0
        }
    }

    /// Average cost at full output, used as commitment priority.
    pub fn full_load_cost(&self) -> f64 {
        self.srmc + self.fixed_cost / self.capacity.max(1e-9)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |reason: &str| {
            Err(ScenarioError::InvalidGenerator { id: self.id.clone(), reason: reason.to_string() })
        };
        if !(self.capacity > 0.0) {
            return bad("capacity must be positive");
        }
        if !(0.0..=1.0).contains(&self.min_stable) {
            return bad("min_stable must lie in [0, 1]");
        }
        if !(self.inertia_const >= 0.0) {
            return bad("inertia constant must be non-negative");
        }
        if (self.inertia_const == 0.0) != self.tech.is_non_synchronous() {
            return bad("inertia constant is zero exactly for wind and utility PV");
        }
        if self.tech == Tech::SynCon && self.min_stable != 0.0 {
            return bad("synchronous condensers have no minimum stable output");
        }
        if !(self.ramp > 0.0) {
            return bad("ramp must be positive");
        }
        if let Some(r) = self.droop {
            if !(r > 0.0) {
                return bad("droop must be positive");
            }
        }
        if self.gov_time_const < 0.0 {
            return bad("governor time constant must be non-negative");
        }
        Ok(())
    }
}

/// The large-scale portfolio of the base (~10 % NSAP) scenario: 7 hydro
/// (2.3 GW), 77 coal (39.4 GW), 5 CCGT (1.7 GW), 12 OCGT (3.6 GW) units and
/// 5.9 GW of wind, spread over the four NEM regions.
pub fn mainland_portfolio() -> Vec<GeneratorSpec> {
    let mut units = Vec::new();

    // (region, units, total MW, number of 666 MW units, SRMC range)
    let coal: [(&str, usize, f64, usize, (f64, f64)); 4] = [
        ("QLD", 25, 13_000.0, 12, (22.0, 34.0)),
        ("NSW", 28, 15_000.0, 14, (24.0, 36.0)),
        ("VIC", 20, 10_000.0, 10, (12.0, 20.0)),
        ("SA", 4, 1_400.0, 0, (36.0, 40.0)),
    ];
    for (region, n, total, n_large, (lo, hi)) in coal {
        let small = (total - 666.0 * n_large as f64) / (n - n_large) as f64;
        for i in 0..n {
            let cap = if i < n_large { 666.0 } else { small };
            let srmc = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            units.push(
                GeneratorSpec::new(format!("COAL_{region}_{:02}", i + 1), region, Tech::Coal, cap)
                    .with_srmc(srmc),
            );
        }
    }

    let hydro: [(&str, usize, f64); 3] = [("QLD", 2, 650.0), ("NSW", 3, 1_050.0), ("VIC", 2, 600.0)];
    for (region, n, total) in hydro {
        for i in 0..n {
            units.push(GeneratorSpec::new(
                format!("HYDRO_{region}_{}", i + 1),
                region,
                Tech::Hydro,
                total / n as f64,
            ));
        }
    }

    let ccgt: [(&str, usize, f64); 3] = [("QLD", 2, 760.0), ("VIC", 1, 340.0), ("SA", 2, 600.0)];
    for (region, n, total) in ccgt {
        for i in 0..n {
            units.push(
                GeneratorSpec::new(format!("CCGT_{region}_{}", i + 1), region, Tech::Ccgt, total / n as f64)
                    .with_srmc(68.0 + 2.0 * i as f64),
            );
        }
    }

    for region in ["QLD", "NSW", "VIC", "SA"] {
        for i in 0..3 {
            units.push(
                GeneratorSpec::new(format!("OCGT_{region}_{}", i + 1), region, Tech::Ocgt, 300.0)
                    .with_srmc(125.0 + 5.0 * i as f64),
            );
        }
    }

    for (region, cap) in [("QLD", 600.0), ("NSW", 1_200.0), ("VIC", 1_900.0), ("SA", 2_200.0)] {
        units.push(GeneratorSpec::new(format!("WF_{region}"), region, Tech::Wind, cap));
    }
    units
}
