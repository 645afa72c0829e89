use super::ScanError;
use crate::contingency::{CcKind, FixedCcConfig};
use crate::dispatch::{Network, UcOptions};
use crate::dynamics::{DeloadedWf, Device, InertiaEmulation, LoadKind, LoadModel, PlacedDevice, SimOptions};
use crate::metrics::Thresholds;
use crate::region::RegionId;
use crate::scenario::{
    apply_prosumers, build_scenario, load_traces, parse_nsap_label, potential_ns_share, synth, mainland_portfolio,
    GeneratorSpec, HourlyTraceSet, ProsumerConfig, Scenario, ScenarioRules,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceSource {
    /// Generated mainland-NEM traces.
    Synthetic { hours: usize, seed: u64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputSpec {
    pub traces: TraceSource,
    /// JSON array of generators; the built-in mainland fleet when absent.
    pub portfolio: Option<PathBuf>,
    pub network: Network,
    /// Annual NS-RES share of the supplied portfolio; estimated from the
    /// traces when absent.
    pub base_nsap: Option<f64>,
    pub rules: ScenarioRules,
    pub prosumers: Option<ProsumerConfig>,
}

impl Default for InputSpec {
    fn default() -> Self {
        InputSpec {
            traces: TraceSource::Synthetic { hours: 8760, seed: 1 },
            portfolio: None,
            network: Network::nem(),
            base_nsap: None,
            rules: ScenarioRules::default(),
            prosumers: None,
        }
    }
}

/// Which sensitivity cases to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub load_models: Vec<LoadKind>,
    pub contingencies: Vec<CcKind>,
    /// Event locations; all network regions when absent.
    pub locations: Option<Vec<RegionId>>,
    /// Meter every region instead of only the event location.
    pub meter_all: bool,
    /// Keep only these meters; implies metering beyond the event location.
    pub meters: Option<Vec<RegionId>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            load_models: vec![LoadKind::Static, LoadKind::Dynamic],
            contingencies: vec![CcKind::Variable, CcKind::Fixed],
            locations: None,
            meter_all: false,
            meters: None,
        }
    }
}

/// Load-model parameters shared by both kinds; `Static` ignores the
/// induction-motor share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadParams {
    pub d_static: f64,
    pub im_fraction: f64,
    pub im_time_const: f64,
    pub im_damping: f64,
}

impl Default for LoadParams {
    fn default() -> Self {
        let d = LoadModel::new(LoadKind::Dynamic);
        LoadParams {
            d_static: d.d_static,
            im_fraction: d.im_fraction,
            im_time_const: d.im_time_const,
            im_damping: d.im_damping,
        }
    }
}

impl LoadParams {
    pub fn model(&self, kind: LoadKind) -> LoadModel {
        LoadModel {
            kind,
            d_static: self.d_static,
            im_fraction: if kind == LoadKind::Dynamic { self.im_fraction } else { 0.0 },
            im_time_const: self.im_time_const,
            im_damping: self.im_damping,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceOption {
    #[default]
    Normal,
    Sc,
    Ie,
    Dl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeviceSpec {
    pub option: DeviceOption,
    /// MVA per region.
    pub sc_rating: f64,
    pub sc_h: f64,
    pub ie: InertiaEmulation,
    pub dl: DeloadedWf,
    /// Host of the IE/DL wind farm; the first network region when absent.
    pub wf_region: Option<RegionId>,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        DeviceSpec {
            option: DeviceOption::Normal,
            sc_rating: 400.0,
            sc_h: 6.0,
            ie: InertiaEmulation::default(),
            dl: DeloadedWf::default(),
            wf_region: None,
        }
    }
}

impl DeviceSpec {
    pub fn roster(&self, net: &Network) -> Vec<PlacedDevice> {
        let wf = self.wf_region.clone().or_else(|| net.regions.first().cloned());
        match (self.option, wf) {
            (DeviceOption::Sc, _) => crate::dynamics::syncon_roster(&net.regions, self.sc_rating, self.sc_h),
            (DeviceOption::Ie, Some(region)) => {
                vec![PlacedDevice { region, device: Device::InertiaEmulation(self.ie.clone()) }]
            }
            (DeviceOption::Dl, Some(region)) => vec![PlacedDevice { region, device: Device::DeloadedWf(self.dl.clone()) }],
            _ => vec![],
        }
    }
}

/// Everything a scan needs. `output`, `workers` and `checkpoint_every`
/// do not influence results and are left out of the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    /// Scenario labels such as `NS40`.
    pub scenarios: Vec<String>,
    pub inputs: InputSpec,
    pub grid: GridSpec,
    pub uc: UcOptions,
    pub load: LoadParams,
    pub devices: DeviceSpec,
    pub fixed_cc: FixedCcConfig,
    pub thresholds: Thresholds,
    pub sim: SimOptions,
    pub output: PathBuf,
    pub workers: usize,
    /// Hours per checkpoint.
    pub checkpoint_every: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            scenarios: (1..=9).map(|k| format!("NS{}0", k)).collect(),
            inputs: InputSpec::default(),
            grid: GridSpec::default(),
            uc: UcOptions::default(),
            load: LoadParams::default(),
            devices: DeviceSpec::default(),
            fixed_cc: FixedCcConfig::default(),
            thresholds: Thresholds::default(),
            sim: SimOptions::default(),
            output: PathBuf::from("scan-out"),
            workers: 1,
            checkpoint_every: 168,
        }
    }
}

impl ScanConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, ScanError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ScanError::Config(format!("{}: {e}", path.as_ref().display())))?;
        serde_json::from_str(&text).map_err(|e| ScanError::Config(format!("{}: {e}", path.as_ref().display())))
    }

    pub fn locations(&self) -> Vec<RegionId> {
        self.grid.locations.clone().unwrap_or_else(|| self.inputs.network.regions.clone())
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        let bad = |m: String| Err(ScanError::Config(m));
        if self.scenarios.is_empty() {
            return bad("at least one scenario is required".into());
        }
        for s in &self.scenarios {
            if parse_nsap_label(s).is_none() {
                return bad(format!("scenario `{s}` is not of the form NSxx"));
            }
        }
        if self.grid.load_models.is_empty() || self.grid.contingencies.is_empty() || self.locations().is_empty() {
            return bad("the sensitivity grid is empty".into());
        }
        if self.workers == 0 {
            return bad("workers must be ≥ 1".into());
        }
        if self.checkpoint_every == 0 {
            return bad("checkpoint_every must be ≥ 1".into());
        }
        self.inputs.network.validate().map_err(|e| ScanError::Config(e.to_string()))?;
        for r in self.locations() {
            if self.inputs.network.region_index(&r).is_none() {
                return bad(format!("location {r} is not in the network"));
            }
            if !r.is_label_safe() {
                return bad(format!("region id `{r}` cannot appear in a case label"));
            }
        }
        for r in self.grid.meters.iter().flatten() {
            if self.inputs.network.region_index(r).is_none() {
                return bad(format!("meter {r} is not in the network"));
            }
        }
        if let Some(r) = &self.devices.wf_region {
            if self.inputs.network.region_index(r).is_none() {
                return bad(format!("device region {r} is not in the network"));
            }
        }
        Ok(())
    }

    /// SHA-256 over the result-relevant configuration and the bytes of any
    /// referenced input files.
    pub fn hash(&self) -> Result<String, ScanError> {
        let mut c = self.clone();
        c.output = PathBuf::new();
        c.workers = 1;
        c.checkpoint_every = 1;
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&c).map_err(|e| ScanError::Config(e.to_string()))?);
        if let TraceSource::Csv { path } = &self.inputs.traces {
            h.update(std::fs::read(path)?);
        }
        if let Some(p) = &self.inputs.portfolio {
            h.update(std::fs::read(p)?);
        }
        Ok(hex::encode(h.finalize()))
    }

    pub fn load_traces(&self) -> Result<HourlyTraceSet, ScanError> {
        let traces = match &self.inputs.traces {
            TraceSource::Synthetic { hours, seed } => synth::nem_traces(*hours, *seed),
            TraceSource::Csv { path } => load_traces(path)?,
        };
        Ok(match &self.inputs.prosumers {
            Some(p) => apply_prosumers(&traces, p)?,
            None => traces,
        })
    }

    pub fn load_portfolio(&self) -> Result<Vec<GeneratorSpec>, ScanError> {
        match &self.inputs.portfolio {
            None => Ok(mainland_portfolio()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text).map_err(|e| ScanError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn base_scenario(&self) -> Result<Scenario, ScanError> {
        let traces = self.load_traces()?;
        let portfolio = self.load_portfolio()?;
        let s0 = self.inputs.base_nsap.unwrap_or_else(|| potential_ns_share(&portfolio, &traces));
        Ok(Scenario::base(portfolio, traces, s0))
    }

    /// Builds one scenario from the base.
    pub fn scenario(&self, base: &Scenario, label: &str) -> Result<Scenario, ScanError> {
        let target = parse_nsap_label(label).ok_or_else(|| ScanError::Config(format!("bad scenario `{label}`")))?;
        let mut s = build_scenario(base, target, &self.inputs.rules)?;
        s.id = label.to_string();
        Ok(s)
    }
}
