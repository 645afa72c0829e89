use super::{FrequencyMetrics, MetricsError};
use crate::region::RegionId;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// One simulated (case, hour, meter) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub case_label: String,
    pub hour: usize,
    pub meter: RegionId,
    /// MW·s
    pub i_sys: f64,
    /// MW·s, metered region.
    pub i_region: f64,
    /// MW
    pub p_cc: f64,
    pub nsip: f64,
    pub metrics: FrequencyMetrics,
}

impl ScanRecord {
    pub fn key(&self) -> (&str, usize, &str) {
        (&self.case_label, self.hour, self.meter.as_str())
    }

    /// The scenario part of the label (`NS40`).
    pub fn scenario(&self) -> &str {
        self.case_label.split('-').next().unwrap_or("")
    }
}

pub const RECORD_CSV_HEADER: &str =
    "case_label,hour,meter,i_sys_mws,i_region_mws,p_cc_mw,nsip,min_rocof,nadir_hz,t_nadir_s,settling_hz,rocof_viol,nadir_viol";

/// Floats are written in shortest round-trip form, so reading a file back
/// reproduces the records bit for bit.
pub fn write_records_csv<W: Write>(mut out: W, records: &[ScanRecord]) -> std::io::Result<()> {
    writeln!(out, "{RECORD_CSV_HEADER}")?;
    for r in records {
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.case_label,
            r.hour,
            r.meter,
            r.i_sys,
            r.i_region,
            r.p_cc,
            r.nsip,
            m.min_rocof,
            m.nadir,
            m.t_nadir,
            m.settling,
            m.rocof_violation as u8,
            m.nadir_violation as u8
        )?;
    }
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<ScanRecord>, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| MetricsError::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != RECORD_CSV_HEADER {
        return Err(MetricsError::Parse("unexpected header".into()));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| MetricsError::Parse(e.to_string()))?;
        let line = i + 2;
        let f = |k: usize| -> Result<f64, MetricsError> {
            row[k].parse().map_err(|_| MetricsError::Parse(format!("line {line}: bad number `{}`", &row[k])))
        };
        let b = |k: usize| -> Result<bool, MetricsError> {
            match &row[k] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(MetricsError::Parse(format!("line {line}: bad flag `{other}`"))),
            }
        };
        if row.len() != 13 {
            return Err(MetricsError::Parse(format!("line {line}: expected 13 fields")));
        }
        out.push(ScanRecord {
            case_label: row[0].to_string(),
            hour: row[1].parse().map_err(|_| MetricsError::Parse(format!("line {line}: bad hour")))?,
            meter: RegionId::from(&row[2]),
            i_sys: f(3)?,
            i_region: f(4)?,
            p_cc: f(5)?,
            nsip: f(6)?,
            metrics: FrequencyMetrics {
                min_rocof: f(7)?,
                nadir: f(8)?,
                t_nadir: f(9)?,
                settling: f(10)?,
                rocof_violation: b(11)?,
                nadir_violation: b(12)?,
            },
        });
    }
    Ok(out)
}

/// Canonical order: label, hour, meter.
pub fn sort_records(records: &mut [ScanRecord]) {
    records.sort_by(|a, b| a.key().cmp(&b.key()));
}
