use super::ScenarioError;
use crate::region::RegionId;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

pub const TRACE_HEADER: [&str; 6] = ["hour", "region", "demand_mw", "wind_cf", "solar_cf", "rooftop_pv_cf"];

/// Hourly samples of one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionTrace {
    pub demand: Vec<f64>,
    pub wind_cf: Vec<f64>,
    pub solar_cf: Vec<f64>,
    pub rooftop_pv_cf: Vec<f64>,
}

impl RegionTrace {
    pub fn with_hours(hours: usize) -> Self {
        RegionTrace {
            demand: Vec::with_capacity(hours),
            wind_cf: Vec::with_capacity(hours),
            solar_cf: Vec::with_capacity(hours),
            rooftop_pv_cf: Vec::with_capacity(hours),
        }
    }

    fn slice(&self, from: usize, to: usize) -> Self {
        RegionTrace {
            demand: self.demand[from..to].to_vec(),
            wind_cf: self.wind_cf[from..to].to_vec(),
            solar_cf: self.solar_cf[from..to].to_vec(),
            rooftop_pv_cf: self.rooftop_pv_cf[from..to].to_vec(),
        }
    }
}

/// Demand and capacity-factor traces on a shared hour axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyTraceSet {
    regions: Vec<RegionId>,
    traces: Vec<RegionTrace>,
    hours: usize,
}

impl HourlyTraceSet {
    /// Builds a set after checking lengths and value ranges.
    pub fn new(regions: Vec<RegionId>, traces: Vec<RegionTrace>) -> Result<Self, ScenarioError> {
        if regions.is_empty() || regions.len() != traces.len() {
            return Err(ScenarioError::EmptyTraces);
        }
        let hours = traces[0].demand.len();
        if hours == 0 {
            return Err(ScenarioError::EmptyTraces);
        }
        for (r, t) in regions.iter().zip(&traces) {
            for v in [&t.demand, &t.wind_cf, &t.solar_cf, &t.rooftop_pv_cf] {
                if v.len() != hours {
                    return Err(ScenarioError::MissingRegion { row: 0, region: r.clone(), hour: v.len().min(hours) });
                }
            }
            for h in 0..hours {
                check_sample(0, h, t.demand[h], t.wind_cf[h], t.solar_cf[h], t.rooftop_pv_cf[h])?;
            }
        }
        Ok(HourlyTraceSet { regions, traces, hours })
    }

    pub fn hours(&self) -> usize {
        self.hours
    }

    pub fn regions(&self) -> &[RegionId] {
        &self.regions
    }

    pub fn region_index(&self, region: &RegionId) -> Option<usize> {
        self.regions.iter().position(|r| r == region)
    }

    pub fn region(&self, region: &RegionId) -> Option<&RegionTrace> {
        self.region_index(region).map(|i| &self.traces[i])
    }

    pub fn traces(&self) -> &[RegionTrace] {
        &self.traces
    }

    pub(crate) fn traces_mut(&mut self) -> &mut [RegionTrace] {
        &mut self.traces
    }

    pub fn demand(&self, region: usize, hour: usize) -> f64 {
        self.traces[region].demand[hour]
    }

    pub fn total_demand(&self, hour: usize) -> f64 {
        self.traces.iter().map(|t| t.demand[hour]).sum()
    }

    /// Hours `[from, to)` as a new set whose hour axis restarts at 0.
    pub fn window(&self, from: usize, to: usize) -> Result<Self, ScenarioError> {
        if from >= to || to > self.hours {
            return Err(ScenarioError::EmptyHorizon);
        }
        Ok(HourlyTraceSet {
            regions: self.regions.clone(),
            traces: self.traces.iter().map(|t| t.slice(from, to)).collect(),
            hours: to - from,
        })
    }

    /// Writes the set in the trace CSV schema, hour-major.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ScenarioError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| ScenarioError::Io(std::io::Error::other(e));
        w.write_record(TRACE_HEADER).map_err(io)?;
        for h in 0..self.hours {
            for (r, t) in self.regions.iter().zip(&self.traces) {
                w.write_record([
                    h.to_string(),
                    r.to_string(),
                    format!("{}", t.demand[h]),
                    format!("{}", t.wind_cf[h]),
                    format!("{}", t.solar_cf[h]),
                    format!("{}", t.rooftop_pv_cf[h]),
                ])
                .map_err(io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn check_sample(row: usize, hour: usize, demand: f64, wind: f64, solar: f64, roof: f64) -> Result<(), ScenarioError> {
    if !(demand > 0.0 && demand.is_finite()) {
        return Err(ScenarioError::ValueOutOfRange { row, hour, column: "demand_mw", value: demand });
    }
    for (column, v) in [("wind_cf", wind), ("solar_cf", solar), ("rooftop_pv_cf", roof)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ScenarioError::ValueOutOfRange { row, hour, column, value: v });
        }
    }
    Ok(())
}

/// Reads a trace CSV file.
pub fn load_traces(path: impl AsRef<Path>) -> Result<HourlyTraceSet, ScenarioError> {
    let file = std::fs::File::open(path)?;
    parse_traces(file)
}

/// Parses trace CSV from any reader. `row` in errors is the 1-based line
/// number in the file (the header is line 1).
pub fn parse_traces<R: Read>(input: R) -> Result<HourlyTraceSet, ScenarioError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers().map_err(|e| ScenarioError::Parse { row: 1, message: e.to_string() })?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols != TRACE_HEADER {
        return Err(ScenarioError::Parse {
            row: 1,
            message: format!("expected header `{}`, found `{}`", TRACE_HEADER.join(","), cols.join(",")),
        });
    }

    let mut order: Vec<RegionId> = Vec::new();
    let mut samples: HashMap<RegionId, BTreeMap<usize, ([f64; 4], usize)>> = HashMap::new();
    let mut any_row_at: BTreeMap<usize, usize> = BTreeMap::new();

    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| ScenarioError::Parse { row, message: e.to_string() })?;
        if rec.len() != 6 {
            return Err(ScenarioError::Parse { row, message: format!("expected 6 fields, found {}", rec.len()) });
        }
        let hour: usize = rec[0]
            .parse()
            .map_err(|_| ScenarioError::Parse { row, message: format!("invalid hour `{}`", &rec[0]) })?;
        let region = RegionId::from(&rec[1]);
        if region.as_str().is_empty() {
            return Err(ScenarioError::Parse { row, message: "empty region".into() });
        }
        let mut vals = [0.0; 4];
        for (k, v) in vals.iter_mut().enumerate() {
            let s = &rec[k + 2];
            *v = s.parse().map_err(|_| ScenarioError::Parse {
                row,
                message: format!("invalid number `{s}` in column {}", TRACE_HEADER[k + 2]),
            })?;
        }
        check_sample(row, hour, vals[0], vals[1], vals[2], vals[3])?;
        let entry = samples.entry(region.clone()).or_insert_with(|| {
            order.push(region.clone());
            BTreeMap::new()
        });
        if entry.insert(hour, (vals, row)).is_some() {
            return Err(ScenarioError::Parse { row, message: format!("duplicate sample for {region} hour {hour}") });
        }
        any_row_at.entry(hour).or_insert(row);
    }

    if order.is_empty() {
        return Err(ScenarioError::EmptyTraces);
    }
    let hours = any_row_at.keys().next_back().map_or(0, |h| h + 1);
    // Gap on the common axis: no region has the hour at all.
    let mut expected = 0;
    for (&h, &row) in &any_row_at {
        if h != expected {
            return Err(ScenarioError::NonContiguousHours { row, region: order[0].clone(), expected, found: h });
        }
        expected += 1;
    }

    let mut traces = Vec::with_capacity(order.len());
    for r in &order {
        let m = &samples[r];
        let mut t = RegionTrace::with_hours(hours);
        for h in 0..hours {
            match m.get(&h) {
                Some((v, _)) => {
                    t.demand.push(v[0]);
                    t.wind_cf.push(v[1]);
                    t.solar_cf.push(v[2]);
                    t.rooftop_pv_cf.push(v[3]);
                }
                None => {
                    return Err(ScenarioError::MissingRegion { row: any_row_at[&h], region: r.clone(), hour: h });
                }
            }
        }
        traces.push(t);
    }
    HourlyTraceSet::new(order, traces)
}
