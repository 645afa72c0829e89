//! Order-independent aggregation of scan records.
//!
//! Every statistic is a commutative, associative fold: counts, fixed-bin
//! histograms, sums in integer micro-units, and two Pareto frontiers over
//! (min RoCoF, NSIP) from which the critical NSIP range can be read for
//! any RoCoF limit.

use super::{MetricsError, ScanRecord};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, width: f64, bins: usize) -> Self {
        Histogram { lo, width, counts: vec![0; bins], underflow: 0, overflow: 0 }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len()).map(|k| self.lo + k as f64 * self.width).collect()
    }

    pub fn add(&mut self, v: f64) {
        let k = ((v - self.lo) / self.width).floor();
        if k < 0.0 {
            self.underflow += 1;
        } else if k as usize >= self.counts.len() {
            self.overflow += 1;
        } else {
            self.counts[k as usize] += 1;
        }
    }

    fn merge(&mut self, o: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        self.underflow += o.underflow;
        self.overflow += o.overflow;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

/// (min RoCoF, NSIP) pairs kept on a frontier.
type Point = (f64, f64);

fn cmp_point(a: &Point, b: &Point) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Keeps points no other point beats on both coordinates; `lower` keeps the
/// south-west frontier (for the lowest violating NSIP), otherwise the
/// north-east one (for the highest safe NSIP).
fn prune(points: &mut Vec<Point>, lower: bool) {
    points.sort_by(cmp_point);
    points.dedup();
    let mut kept: Vec<Point> = Vec::new();
    if lower {
        // Ascending RoCoF: keep strictly decreasing NSIP.
        let mut best = f64::INFINITY;
        for p in points.iter() {
            if p.1 < best {
                best = p.1;
                kept.push(*p);
            }
        }
    } else {
        let mut best = f64::NEG_INFINITY;
        for p in points.iter().rev() {
            if p.1 > best {
                best = p.1;
                kept.push(*p);
            }
        }
        kept.reverse();
    }
    *points = kept;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub records: u64,
    pub i_sys_min: Option<f64>,
    pub i_sys_max: Option<f64>,
    /// Σ i_sys in µMW·s, exact regardless of record order.
    pub i_sys_sum_micro: i128,
    pub rocof_violations: u64,
    pub nadir_violations: u64,
    /// GW·s bins.
    pub inertia_hist: Histogram,
    /// MW bins.
    pub p_cc_hist: Histogram,
    pub min_rocof_hist: Histogram,
    pub nadir_hist: Histogram,
    /// Hours per NSIP decile.
    pub nsip_decile_hours: Vec<u64>,
    pub nsip_decile_rocof_violations: Vec<u64>,
    pub lower_frontier: Vec<Point>,
    pub upper_frontier: Vec<Point>,
}

impl Default for FamilySummary {
    fn default() -> Self {
        FamilySummary {
            records: 0,
            i_sys_min: None,
            i_sys_max: None,
            i_sys_sum_micro: 0,
            rocof_violations: 0,
            nadir_violations: 0,
            inertia_hist: Histogram::new(0.0, 5.0, 100),
            p_cc_hist: Histogram::new(0.0, 50.0, 30),
            min_rocof_hist: Histogram::new(-3.0, 0.1, 30),
            nadir_hist: Histogram::new(48.0, 0.1, 20),
            nsip_decile_hours: vec![0; 10],
            nsip_decile_rocof_violations: vec![0; 10],
            lower_frontier: vec![],
            upper_frontier: vec![],
        }
    }
}

impl FamilySummary {
    pub fn add(&mut self, r: &ScanRecord) {
        self.records += 1;
        self.i_sys_min = Some(self.i_sys_min.map_or(r.i_sys, |v| v.min(r.i_sys)));
        self.i_sys_max = Some(self.i_sys_max.map_or(r.i_sys, |v| v.max(r.i_sys)));
        self.i_sys_sum_micro += (r.i_sys * 1e6).round() as i128;
        self.rocof_violations += r.metrics.rocof_violation as u64;
        self.nadir_violations += r.metrics.nadir_violation as u64;
        self.inertia_hist.add(r.i_sys / 1000.0);
        self.p_cc_hist.add(r.p_cc);
        self.min_rocof_hist.add(r.metrics.min_rocof);
        self.nadir_hist.add(r.metrics.nadir);
        let decile = ((r.nsip * 10.0).floor() as usize).min(9);
        self.nsip_decile_hours[decile] += 1;
        self.nsip_decile_rocof_violations[decile] += r.metrics.rocof_violation as u64;
        self.lower_frontier.push((r.metrics.min_rocof, r.nsip));
        self.upper_frontier.push((r.metrics.min_rocof, r.nsip));
        // Pruning is idempotent; do it when the buffers grow.
        if self.lower_frontier.len() > 256 {
            prune(&mut self.lower_frontier, true);
        }
        if self.upper_frontier.len() > 256 {
            prune(&mut self.upper_frontier, false);
        }
    }

    pub fn merge(&mut self, o: &FamilySummary) {
        self.records += o.records;
        self.i_sys_min = match (self.i_sys_min, o.i_sys_min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.i_sys_max = match (self.i_sys_max, o.i_sys_max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.i_sys_sum_micro += o.i_sys_sum_micro;
        self.rocof_violations += o.rocof_violations;
        self.nadir_violations += o.nadir_violations;
        self.inertia_hist.merge(&o.inertia_hist);
        self.p_cc_hist.merge(&o.p_cc_hist);
        self.min_rocof_hist.merge(&o.min_rocof_hist);
        self.nadir_hist.merge(&o.nadir_hist);
        for k in 0..10 {
            self.nsip_decile_hours[k] += o.nsip_decile_hours[k];
            self.nsip_decile_rocof_violations[k] += o.nsip_decile_rocof_violations[k];
        }
        self.lower_frontier.extend_from_slice(&o.lower_frontier);
        self.upper_frontier.extend_from_slice(&o.upper_frontier);
        self.normalize();
    }

    fn normalize(&mut self) {
        prune(&mut self.lower_frontier, true);
        prune(&mut self.upper_frontier, false);
    }

    pub fn i_sys_mean(&self) -> Option<f64> {
        (self.records > 0).then(|| self.i_sys_sum_micro as f64 / 1e6 / self.records as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    /// Per case label.
    pub families: BTreeMap<String, FamilySummary>,
    /// Everything together.
    pub union: FamilySummary,
}

impl ScanSummary {
    pub fn add(&mut self, r: &ScanRecord) {
        self.families.entry(r.case_label.clone()).or_default().add(r);
        self.union.add(r);
    }

    pub fn merge(&mut self, o: &ScanSummary) {
        for (k, v) in &o.families {
            self.families.entry(k.clone()).or_default().merge(v);
        }
        self.union.merge(&o.union);
        self.normalize();
    }

    fn normalize(&mut self) {
        self.families.values_mut().for_each(FamilySummary::normalize);
        self.union.normalize();
    }

    pub fn is_empty(&self) -> bool {
        self.union.records == 0
    }
}

pub fn aggregate_scan<'a>(records: impl IntoIterator<Item = &'a ScanRecord>) -> ScanSummary {
    let mut s = ScanSummary::default();
    for r in records {
        s.add(r);
    }
    s.normalize();
    s
}

/// `lo`: lowest NSIP of any hour violating the RoCoF limit; `hi`: highest
/// NSIP of any hour within it (`None` if every hour violates). The two may
/// overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRange {
    pub lo: f64,
    pub hi: Option<f64>,
}

pub fn critical_nsip_range(summary: &FamilySummary, rocof_crit: f64) -> Result<CriticalRange, MetricsError> {
    let limit = -rocof_crit;
    let lo = summary.lower_frontier.iter().filter(|p| p.0 < limit).map(|p| p.1).fold(None, |a: Option<f64>, v| {
        Some(a.map_or(v, |a| a.min(v)))
    });
    let hi = summary.upper_frontier.iter().filter(|p| p.0 >= limit).map(|p| p.1).fold(None, |a: Option<f64>, v| {
        Some(a.map_or(v, |a| a.max(v)))
    });
    match lo {
        Some(lo) => Ok(CriticalRange { lo, hi }),
        None => Err(MetricsError::NoViolations { max_ok_nsip: hi }),
    }
}

#[cfg(test)]
mod tests {
    use super::super::FrequencyMetrics;
    use super::*;
    use proptest::prelude::*;

    fn rec(label: &str, hour: usize, i_sys: f64, nsip: f64, rocof: f64) -> ScanRecord {
        ScanRecord {
            case_label: label.into(),
            hour,
            meter: "QLD".into(),
            i_sys,
            i_region: i_sys / 4.0,
            p_cc: 500.0,
            nsip,
            metrics: FrequencyMetrics {
                min_rocof: rocof,
                nadir: 49.6,
                t_nadir: 5.0,
                settling: 49.8,
                rocof_violation: rocof < -0.5,
                nadir_violation: false,
            },
        }
    }

    #[test]
    fn empty_stream() {
        let s = aggregate_scan(&[]);
        assert!(s.is_empty() && s.families.is_empty());
        assert!(matches!(critical_nsip_range(&s.union, 0.5), Err(MetricsError::NoViolations { max_ok_nsip: None })));
    }

    #[test]
    fn hand_tally() {
        let rs = [
            rec("NS40-LsCvQLD-QLD", 0, 100_000.0, 0.35, -0.2),
            rec("NS40-LsCvQLD-QLD", 1, 60_000.0, 0.62, -0.7),
            rec("NS40-LdCvQLD-QLD", 0, 80_000.0, 0.55, -0.45),
        ];
        let s = aggregate_scan(&rs);
        assert_eq!(s.union.records, 3);
        assert_eq!(s.union.rocof_violations, 1);
        assert_eq!(s.families["NS40-LsCvQLD-QLD"].records, 2);
        assert_eq!(s.families["NS40-LdCvQLD-QLD"].rocof_violations, 0);
        assert_eq!(s.union.i_sys_min, Some(60_000.0));
        assert_eq!(s.union.i_sys_mean(), Some(80_000.0));
        assert_eq!(s.union.nsip_decile_hours[3], 1);
        assert_eq!(s.union.nsip_decile_rocof_violations[6], 1);
        assert_eq!(s.union.inertia_hist.counts[20], 1); // 100 GW·s
        let r = critical_nsip_range(&s.union, 0.5).unwrap();
        assert_eq!(r, CriticalRange { lo: 0.62, hi: Some(0.55) });
        // A looser limit has no violations left.
        assert!(matches!(
            critical_nsip_range(&s.union, 1.0),
            Err(MetricsError::NoViolations { max_ok_nsip: Some(v) }) if v == 0.62
        ));
    }

    #[test]
    fn threshold_dataset_gives_adjacent_bounds() {
        // Violations exactly for NSIP > 0.7.
        let rs: Vec<ScanRecord> = (0..=100)
            .map(|k| {
                let x = k as f64 / 100.0;
                rec("NS70-LsCvQLD-QLD", k, 1e5, x, if x > 0.7 { -0.8 } else { -0.3 })
            })
            .collect();
        let r = critical_nsip_range(&aggregate_scan(&rs).union, 0.5).unwrap();
        assert_eq!(r.hi, Some(0.7));
        assert!(r.lo > 0.7 && r.lo <= 0.71);
    }

    #[test]
    fn overlap_is_reported() {
        let rs = [
            rec("X", 0, 1e5, 0.60, -0.55),
            rec("X", 1, 1e5, 0.67, -0.40),
            rec("X", 2, 1e5, 0.75, -0.9),
            rec("X", 3, 1e5, 0.50, -0.2),
        ];
        let r = critical_nsip_range(&aggregate_scan(&rs).union, 0.5).unwrap();
        assert_eq!(r, CriticalRange { lo: 0.60, hi: Some(0.67) });
        let r = critical_nsip_range(&aggregate_scan(&rs).union, 0.8).unwrap();
        assert_eq!(r, CriticalRange { lo: 0.75, hi: Some(0.67) });
    }

    fn brute(rs: &[ScanRecord], crit: f64) -> (Option<f64>, Option<f64>) {
        let lo = rs.iter().filter(|r| r.metrics.min_rocof < -crit).map(|r| r.nsip).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))));
        let hi = rs.iter().filter(|r| r.metrics.min_rocof >= -crit).map(|r| r.nsip).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
        (lo, hi)
    }

    proptest! {
        #[test]
        fn aggregation_is_order_free_and_frontiers_are_exact(
            raw in prop::collection::vec((0usize..3, 1e4f64..3e5, 0.0f64..1.0, -1.5f64..0.0), 0..600),
            split in 0usize..600,
            crit in 0.1f64..1.4,
        ) {
            let labels = ["A", "B", "C"];
            let rs: Vec<ScanRecord> = raw.iter().enumerate().map(|(h, &(l, i, n, r))| rec(labels[l], h, i, n, r)).collect();
            let whole = aggregate_scan(&rs);
            let mut rev = rs.clone();
            rev.reverse();
            prop_assert_eq!(&aggregate_scan(&rev), &whole);
            let cut = split.min(rs.len());
            let mut merged = aggregate_scan(&rs[cut..]);
            merged.merge(&aggregate_scan(&rs[..cut]));
            prop_assert_eq!(&merged, &whole);

            let (lo, hi) = brute(&rs, crit);
            match critical_nsip_range(&whole.union, crit) {
                Ok(r) => { prop_assert_eq!(Some(r.lo), lo); prop_assert_eq!(r.hi, hi); }
                Err(MetricsError::NoViolations { max_ok_nsip }) => { prop_assert!(lo.is_none()); prop_assert_eq!(max_ok_nsip, hi); }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn summary_serializes() {
        let s = aggregate_scan(&[rec("NS40-LsCvQLD-QLD", 0, 100_000.0, 0.35, -0.2)]);
        let json = serde_json::to_string(&s).unwrap();
        let back: ScanSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
