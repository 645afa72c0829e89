//! `freqscan` command-line front end.
//!
//! Exit codes: 0 success, 1 error, 2 a scenario was infeasible, 64 usage.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use freqscan_core::contingency::{case_label, parse_label, CcKind, SensitivityCase};
use freqscan_core::dispatch::{solve_uc, validate_uc, DispatchError, InertiaConstraint};
use freqscan_core::dynamics::{write_trace_csv, LoadKind};
use freqscan_core::metrics::{aggregate_scan, critical_nsip_range, MetricsError, ScanSummary};
use freqscan_core::orchestrator::{
    planned_cases, replay_case, resume, run_scan, DeviceOption, ResultStore, ScanConfig, ScanError, TraceSource,
};
use freqscan_core::scenario::{parse_nsap_label, synth};
use freqscan_core::RegionId;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "freqscan", version, about = "Time-series frequency stability scans")]
pub struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispatch every scenario and simulate every case in every hour.
    Scan(ScanArgs),
    /// Re-run one case in one hour and dump its frequency trace.
    Case(CaseArgs),
    /// Summarise one or more result stores.
    Report(ReportArgs),
    /// Check a configuration, optionally dispatching and re-checking every scenario.
    Validate(ValidateArgs),
    /// Write synthetic hourly demand and resource traces as CSV.
    GenTraces(GenTracesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoadArg {
    Static,
    Dynamic,
}

impl From<LoadArg> for LoadKind {
    fn from(l: LoadArg) -> Self {
        match l {
            LoadArg::Static => LoadKind::Static,
            LoadArg::Dynamic => LoadKind::Dynamic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContingencyArg {
    Variable,
    Fixed,
}

impl From<ContingencyArg> for CcKind {
    fn from(c: ContingencyArg) -> Self {
        match c {
            ContingencyArg::Variable => CcKind::Variable,
            ContingencyArg::Fixed => CcKind::Fixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DevicesArg {
    Normal,
    Sc,
    Ie,
    Dl,
}

impl From<DevicesArg> for DeviceOption {
    fn from(d: DevicesArg) -> Self {
        match d {
            DevicesArg::Normal => DeviceOption::Normal,
            DevicesArg::Sc => DeviceOption::Sc,
            DevicesArg::Ie => DeviceOption::Ie,
            DevicesArg::Dl => DeviceOption::Dl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InertiaArg {
    Off,
    Regional,
}

fn scenario_label(s: &str) -> Result<String, String> {
    parse_nsap_label(s).map(|_| s.to_string()).ok_or_else(|| format!("`{s}` is not of the form NSxx"))
}

fn meter_arg(s: &str) -> Result<Meter, String> {
    if s == "all" {
        Ok(Meter::All)
    } else if RegionId::from(s).is_label_safe() {
        Ok(Meter::Region(s.into()))
    } else {
        Err(format!("`{s}` is not a region id"))
    }
}

fn region_arg(s: &str) -> Result<RegionId, String> {
    let r = RegionId::from(s);
    if r.is_label_safe() {
        Ok(r)
    } else {
        Err(format!("`{s}` is not a region id"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Meter {
    All,
    Region(RegionId),
}

/// Overrides applied on top of `--config` (or the built-in defaults).
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON scan configuration; built-in defaults when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario labels (NS10 … NS90); repeat or comma-separate.
    #[arg(long, value_delimiter = ',', value_parser = scenario_label)]
    pub scenario: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub load_model: Vec<LoadArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub contingency: Vec<ContingencyArg>,
    /// Contingency locations.
    #[arg(long, value_delimiter = ',', value_parser = region_arg)]
    pub location: Vec<RegionId>,
    /// Metered region, or `all`.
    #[arg(long, value_parser = meter_arg)]
    pub meter: Option<Meter>,
    #[arg(long, value_enum)]
    pub devices: Option<DevicesArg>,
    /// RoCoF limit, Hz/s; used by both the dispatch constraint and the violation test.
    #[arg(long)]
    pub rocof_crit: Option<f64>,
    /// Nominal frequency, Hz.
    #[arg(long)]
    pub f0: Option<f64>,
    /// Nadir limit, Hz.
    #[arg(long)]
    pub nadir_floor: Option<f64>,
    /// RoCoF measurement window, s.
    #[arg(long)]
    pub rocof_window: Option<f64>,
    /// Fixed contingency size, MW.
    #[arg(long)]
    pub fixed_cc: Option<f64>,
    #[arg(long, value_enum)]
    pub inertia_constraint: Option<InertiaArg>,
    /// Spinning reserve as a fraction of regional demand.
    #[arg(long)]
    pub reserve: Option<f64>,
    /// Length of the synthetic trace year, hours.
    #[arg(long)]
    pub hours: Option<usize>,
    /// Result store directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ScanConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScanConfig::from_json_file(p)?,
            None => ScanConfig::default(),
        };
        if !self.scenario.is_empty() {
            cfg.scenarios = self.scenario.clone();
        }
        if !self.load_model.is_empty() {
            cfg.grid.load_models = self.load_model.iter().map(|&l| l.into()).collect();
        }
        if !self.contingency.is_empty() {
            cfg.grid.contingencies = self.contingency.iter().map(|&c| c.into()).collect();
        }
        if !self.location.is_empty() {
            cfg.grid.locations = Some(self.location.clone());
        }
        match &self.meter {
            Some(Meter::All) => {
                cfg.grid.meter_all = true;
                cfg.grid.meters = None;
            }
            Some(Meter::Region(r)) => cfg.grid.meters = Some(vec![r.clone()]),
            None => {}
        }
        if let Some(d) = self.devices {
            cfg.devices.option = d.into();
        }
        if let Some(x) = self.rocof_crit {
            cfg.uc.rocof_crit = x;
            cfg.thresholds.rocof_crit = x;
        }
        if let Some(x) = self.f0 {
            cfg.uc.f0 = x;
        }
        if let Some(x) = self.nadir_floor {
            cfg.thresholds.nadir_floor = x;
        }
        if let Some(x) = self.rocof_window {
            cfg.thresholds.window = x;
        }
        if let Some(x) = self.fixed_cc {
            cfg.fixed_cc.size = x;
        }
        if let Some(c) = self.inertia_constraint {
            cfg.uc.inertia_constraint = match c {
                InertiaArg::Off => InertiaConstraint::Off,
                InertiaArg::Regional => InertiaConstraint::Regional,
            };
        }
        if let Some(x) = self.reserve {
            cfg.uc.reserve_fraction = Some(x);
        }
        if let Some(h) = self.hours {
            match &mut cfg.inputs.traces {
                TraceSource::Synthetic { hours, .. } => *hours = h,
                TraceSource::Csv { .. } => bail!("--hours only applies to synthetic traces"),
            }
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        check_positive("rocof-crit", cfg.thresholds.rocof_crit)?;
        check_positive("f0", cfg.uc.f0)?;
        check_positive("rocof-window", cfg.thresholds.window)?;
        if !(cfg.fixed_cc.size >= 0.0) {
            bail!("fixed-cc must be ≥ 0");
        }
        if let Some(r) = cfg.uc.reserve_fraction {
            if !(0.0..=1.0).contains(&r) {
                bail!("reserve must lie in [0, 1]");
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        bail!("{name} must be positive")
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Continue the store in `--out` instead of starting afresh.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Case label such as `NS80-LsCvQLD-QLD`; otherwise built from the first
    /// `--scenario`, `--load-model`, `--contingency`, `--location` and `--meter`.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub hour: usize,
    /// Trace CSV path; `<out>/case_<label>_h<hour>.csv` when absent.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result store directories; summaries of several stores are merged.
    #[arg(long, required = true)]
    pub store: Vec<PathBuf>,
    /// RoCoF limit for the critical NSIP range, Hz/s.
    #[arg(long, default_value_t = 0.5)]
    pub rocof_crit: f64,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Also dispatch each scenario and re-check the schedule.
    #[arg(long)]
    pub dispatch: bool,
    /// Print the resolved configuration as JSON.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct GenTracesArgs {
    #[arg(long, default_value_t = 8760)]
    pub hours: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let out = match cli.command {
        Command::Scan(a) => cmd_scan(&a),
        Command::Case(a) => cmd_case(&a),
        Command::Report(a) => cmd_report(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::GenTraces(a) => cmd_gen_traces(&a),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_ERROR
            }
        }
    }
}

/// A semantically malformed argument, reported with the usage exit code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn cmd_scan(a: &ScanArgs) -> Result<i32> {
    let cfg = a.cfg.resolve()?;
    let store = if a.resume && cfg.output.join("manifest.json").exists() {
        resume(&cfg, ResultStore::open(&cfg.output)?)?
    } else {
        run_scan(&cfg)?
    };
    let records = store.completed_count();
    eprintln!("{records} keys stored in {}", store.dir().display());
    let mut code = EXIT_OK;
    for s in store.skipped() {
        eprintln!("skipped {}: {}", s.scenario, s.reason);
        if s.infeasible {
            code = EXIT_INFEASIBLE;
        }
    }
    Ok(code)
}

fn case_from_flags(a: &CaseArgs) -> Result<String> {
    let c = &a.cfg;
    let usage = |m: &str| anyhow::Error::new(Usage(m.to_string()));
    let scenario = c.scenario.first().ok_or_else(|| usage("--label or --scenario is required"))?;
    let location = c.location.first().ok_or_else(|| usage("--label or --location is required"))?;
    let meter = match &c.meter {
        None => location.clone(),
        Some(Meter::Region(r)) => r.clone(),
        Some(Meter::All) => return Err(usage("a single case needs a single --meter")),
    };
    Ok(case_label(&SensitivityCase {
        scenario: scenario.clone(),
        load_model: c.load_model.first().copied().unwrap_or(LoadArg::Static).into(),
        contingency_kind: c.contingency.first().copied().unwrap_or(ContingencyArg::Variable).into(),
        location: location.clone(),
        meter,
    }))
}

fn cmd_case(a: &CaseArgs) -> Result<i32> {
    let label = match &a.label {
        Some(l) => {
            parse_label(l).map_err(|e| Usage(e.to_string()))?;
            l.clone()
        }
        None => case_from_flags(a)?,
    };
    let cfg = a.cfg.resolve()?;
    let rep = match replay_case(&cfg, &label, a.hour) {
        Ok(r) => r,
        Err(ScanError::Dispatch(e @ DispatchError::Infeasible { .. })) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e.into()),
    };
    match &rep.trace {
        Some(trace) => {
            let path = a.trace.clone().unwrap_or_else(|| cfg.output.join(format!("case_{label}_h{}.csv", a.hour)));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
            }
            let f = File::create(&path).with_context(|| path.display().to_string())?;
            let mut w = BufWriter::new(f);
            write_trace_csv(&mut w, trace)?;
            w.flush()?;
            eprintln!("trace written to {}", path.display());
        }
        None => eprintln!("nothing trips in hour {}; no trace written", a.hour),
    }
    #[derive(Serialize)]
    struct Out<'a> {
        record: &'a freqscan_core::ScanRecord,
        contingency: &'a Option<freqscan_core::ContingencyCase>,
    }
    println!("{}", serde_json::to_string_pretty(&Out { record: &rep.record, contingency: &rep.contingency })?);
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub records: u64,
    pub rocof_violations: u64,
    pub nadir_violations: u64,
    pub i_sys_min: Option<f64>,
    pub i_sys_max: Option<f64>,
    pub i_sys_mean: Option<f64>,
    pub critical_nsip: Option<freqscan_core::metrics::CriticalRange>,
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub stores: Vec<PathBuf>,
    pub incomplete: Vec<PathBuf>,
    pub skipped: Vec<String>,
    pub rocof_crit: f64,
    pub union: FamilyReport,
    pub families: BTreeMap<String, FamilyReport>,
    pub summary: ScanSummary,
}

fn family_report(f: &freqscan_core::metrics::FamilySummary, rocof_crit: f64) -> Result<FamilyReport> {
    let (critical_nsip, note) = match critical_nsip_range(f, rocof_crit) {
        Ok(r) => (Some(r), None),
        Err(e @ MetricsError::NoViolations { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    Ok(FamilyReport {
        records: f.records,
        rocof_violations: f.rocof_violations,
        nadir_violations: f.nadir_violations,
        i_sys_min: f.i_sys_min,
        i_sys_max: f.i_sys_max,
        i_sys_mean: f.i_sys_mean(),
        critical_nsip,
        note,
    })
}

/// Merged summary of the stores in `dirs`.
pub fn build_report(dirs: &[PathBuf], rocof_crit: f64) -> Result<Report> {
    let mut summary = ScanSummary::default();
    let mut incomplete = Vec::new();
    let mut skipped = Vec::new();
    for d in dirs {
        let store = ResultStore::open(d).with_context(|| d.display().to_string())?;
        summary.merge(&aggregate_scan(&store.records()?));
        if !store.is_complete() {
            incomplete.push(d.clone());
        }
        skipped.extend(store.skipped().iter().map(|s| format!("{}: {}", s.scenario, s.reason)));
    }
    let families = summary
        .families
        .iter()
        .map(|(k, f)| Ok((k.clone(), family_report(f, rocof_crit)?)))
        .collect::<Result<_>>()?;
    Ok(Report {
        stores: dirs.to_vec(),
        incomplete,
        skipped,
        rocof_crit,
        union: family_report(&summary.union, rocof_crit)?,
        families,
        summary,
    })
}

fn cmd_report(a: &ReportArgs) -> Result<i32> {
    check_positive("rocof-crit", a.rocof_crit).map_err(|e| Usage(e.to_string()))?;
    let report = build_report(&a.store, a.rocof_crit)?;
    if let Some(note) = &report.union.note {
        eprintln!("{note}");
    }
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match &a.out {
        Some(p) => std::fs::write(p, json).with_context(|| p.display().to_string())?,
        None => print!("{json}"),
    }
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs) -> Result<i32> {
    let cfg = a.cfg.resolve()?;
    if a.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
    }
    let cases = planned_cases(&cfg);
    let hours = match &cfg.inputs.traces {
        TraceSource::Synthetic { hours, .. } => *hours,
        TraceSource::Csv { .. } => cfg.load_traces()?.hours(),
    };
    let hours = cfg.uc.horizon.map_or(hours, |(s, e)| e.saturating_sub(s));
    println!("config {}", cfg.hash()?);
    println!("{} cases × {hours} hours", cases.len());
    if !a.dispatch {
        return Ok(EXIT_OK);
    }
    let base = cfg.base_scenario()?;
    let mut code = EXIT_OK;
    for label in &cfg.scenarios {
        let scenario = match cfg.scenario(&base, label) {
            Ok(s) => s,
            Err(e) => {
                println!("{label}: not built, {e}");
                continue;
            }
        };
        match solve_uc(&scenario, &cfg.inputs.network, &cfg.uc) {
            Ok(uc) => {
                let rep = validate_uc(&uc, &scenario, &cfg.inputs.network, &cfg.uc);
                println!("{label}: {} hours, {} violations", uc.len(), rep.len());
                for v in rep.violations.iter().take(10) {
                    println!("  {v:?}");
                }
                if !rep.is_empty() && code == EXIT_OK {
                    code = EXIT_ERROR;
                }
            }
            Err(e @ DispatchError::Infeasible { .. }) => {
                println!("{label}: {e}");
                code = EXIT_INFEASIBLE;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(code)
}

fn cmd_gen_traces(a: &GenTracesArgs) -> Result<i32> {
    if a.hours == 0 {
        return Err(Usage("--hours must be ≥ 1".into()).into());
    }
    let traces = synth::nem_traces(a.hours, a.seed);
    write_file(&a.out, |w| traces.write_csv(w).map_err(Into::into))?;
    eprintln!("{} hours of {} regions written to {}", a.hours, traces.regions().len(), a.out.display());
    Ok(EXIT_OK)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let f = File::create(path).with_context(|| path.display().to_string())?;
    let mut w = BufWriter::new(f);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}
