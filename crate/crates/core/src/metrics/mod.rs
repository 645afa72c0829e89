//! Frequency-stability indices, penetration metrics and scan aggregation.

mod record;
mod summary;

pub use record::{read_records_csv, sort_records, write_records_csv, ScanRecord, RECORD_CSV_HEADER};
pub use summary::{aggregate_scan, critical_nsip_range, CriticalRange, FamilySummary, Histogram, ScanSummary};

use crate::dispatch::UcHour;
use crate::dynamics::FrequencyTrace;
use crate::scenario::GeneratorSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("RoCoF window {window} s does not fit the post-event trace")]
    WindowTooLong { window: f64 },
    #[error("trace of {duration} s is too short")]
    TraceTooShort { duration: f64 },
    #[error("no generation is dispatched")]
    ZeroDispatch,
    #[error("no RoCoF violations{}", .max_ok_nsip.map(|v| format!("; highest safe NSIP {v:.4}")).unwrap_or_default())]
    NoViolations { max_ok_nsip: Option<f64> },
    #[error("region index {0} is not in the trace")]
    UnknownRegion(usize),
    #[error("malformed record: {0}")]
    Parse(String),
}

/// Limits and measurement settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Hz/s, positive.
    pub rocof_crit: f64,
    /// Hz
    pub nadir_floor: f64,
    /// RoCoF window, s.
    pub window: f64,
    /// Length of the tail averaged into the settling frequency, s.
    pub settling_window: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { rocof_crit: 0.5, nadir_floor: 49.5, window: 0.5, settling_window: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMetrics {
    /// Most negative windowed RoCoF, Hz/s.
    pub min_rocof: f64,
    /// Hz
    pub nadir: f64,
    /// s
    pub t_nadir: f64,
    /// Hz
    pub settling: f64,
    pub rocof_violation: bool,
    pub nadir_violation: bool,
}

fn series(trace: &FrequencyTrace, region: usize) -> Result<&[f64], MetricsError> {
    trace.f.get(region).map(Vec::as_slice).ok_or(MetricsError::UnknownRegion(region))
}

/// Most negative `(f(t+w) − f(t))/w` over sample times t ≥ event.
pub fn min_rocof(trace: &FrequencyTrace, region: usize, window: f64) -> Result<f64, MetricsError> {
    let f = series(trace, region)?;
    let w = (window / trace.dt).round() as usize;
    let ev = trace.event_index();
    if w == 0 || window + 1e-12 < trace.dt || ev + w >= f.len() {
        return Err(MetricsError::WindowTooLong { window });
    }
    let span = w as f64 * trace.dt;
    Ok((ev..f.len() - w).map(|k| (f[k + w] - f[k]) / span).fold(f64::INFINITY, f64::min))
}

/// Lowest sample at or after the event and its time (first occurrence).
pub fn nadir(trace: &FrequencyTrace, region: usize) -> Result<(f64, f64), MetricsError> {
    let f = series(trace, region)?;
    let ev = trace.event_index().min(f.len().saturating_sub(1));
    let mut best = (f64::INFINITY, ev);
    for (k, &v) in f.iter().enumerate().skip(ev) {
        if v < best.0 {
            best = (v, k);
        }
    }
    Ok((best.0, trace.time(best.1)))
}

/// Mean of the last `tail` seconds.
pub fn settling_frequency(trace: &FrequencyTrace, region: usize, tail: f64) -> Result<f64, MetricsError> {
    let f = series(trace, region)?;
    if trace.duration < 2.0 * tail || tail <= 0.0 {
        return Err(MetricsError::TraceTooShort { duration: trace.duration });
    }
    let n = ((tail / trace.dt).round() as usize).clamp(1, f.len());
    Ok(f[f.len() - n..].iter().sum::<f64>() / n as f64)
}

/// All indices of one region of a trace.
pub fn evaluate(trace: &FrequencyTrace, region: usize, th: &Thresholds) -> Result<FrequencyMetrics, MetricsError> {
    let min_rocof = min_rocof(trace, region, th.window)?;
    let (nadir, t_nadir) = nadir(trace, region)?;
    let settling = settling_frequency(trace, region, th.settling_window)?;
    Ok(FrequencyMetrics {
        min_rocof,
        nadir,
        t_nadir,
        settling,
        rocof_violation: min_rocof < -th.rocof_crit,
        nadir_violation: nadir < th.nadir_floor,
    })
}

/// Metrics of an undisturbed hour.
pub fn flat_metrics(f0: f64, event_time: f64, th: &Thresholds) -> FrequencyMetrics {
    FrequencyMetrics {
        min_rocof: 0.0,
        nadir: f0,
        t_nadir: event_time,
        settling: f0,
        rocof_violation: 0.0 < -th.rocof_crit,
        nadir_violation: f0 < th.nadir_floor,
    }
}

/// Non-synchronous instantaneous penetration p_NS / (p_NS + p_SG).
pub fn nsip(uc: &UcHour, portfolio: &[GeneratorSpec]) -> Result<f64, MetricsError> {
    let (mut ns, mut sg) = (0.0, 0.0);
    for (g, u) in portfolio.iter().zip(&uc.units) {
        if g.tech.is_non_synchronous() {
            ns += u.p;
        } else if u.on {
            sg += u.p;
        }
    }
    if ns + sg <= 0.0 {
        return Err(MetricsError::ZeroDispatch);
    }
    Ok(ns / (ns + sg))
}

/// Local minima (value, time) at or after the event; plateaus count once
/// and a dip only counts if the trace then rises by at least `prominence`.
pub fn local_minima(trace: &FrequencyTrace, region: usize, prominence: f64) -> Result<Vec<(f64, f64)>, MetricsError> {
    let f = series(trace, region)?;
    let ev = trace.event_index();
    let mut out = Vec::new();
    let mut k = ev.max(1);
    while k + 1 < f.len() {
        if f[k] < f[k - 1] {
            let mut j = k;
            while j + 1 < f.len() && f[j + 1] == f[j] {
                j += 1;
            }
            if j + 1 < f.len() && f[j + 1] > f[j] {
                // Require a rise of `prominence` before the next fall.
                let mut peak = f[j];
                let mut m = j + 1;
                while m < f.len() && f[m] >= f[m - 1] {
                    peak = f[m];
                    m += 1;
                }
                if peak - f[j] >= prominence {
                    out.push((f[j], trace.time(j)));
                }
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    Ok(out)
}
