//! On-disk result store: `manifest.json` plus one CSV shard per case label.
//!
//! Shards are appended first and the manifest is replaced atomically
//! afterwards, so after a crash the manifest's completed index is the
//! source of truth; rows beyond it are dropped when the store is reopened.

use super::ScanError;
use crate::metrics::{read_records_csv, sort_records, write_records_csv, ScanRecord, RECORD_CSV_HEADER};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

const MANIFEST: &str = "manifest.json";
const SHARDS: &str = "shards";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedScenario {
    pub scenario: String,
    pub reason: String,
    /// The scenario's dispatch was infeasible (as opposed to unbuildable).
    pub infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub config_hash: String,
    /// Completed hours per case label, as inclusive ranges.
    pub completed: BTreeMap<String, Vec<(usize, usize)>>,
    pub skipped: Vec<SkippedScenario>,
    pub complete: bool,
}

fn to_ranges(hours: &BTreeSet<usize>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &h in hours {
        match out.last_mut() {
            Some(last) if last.1 + 1 == h => last.1 = h,
            _ => out.push((h, h)),
        }
    }
    out
}

fn from_ranges(ranges: &[(usize, usize)]) -> BTreeSet<usize> {
    ranges.iter().flat_map(|&(a, b)| a..=b).collect()
}

/// Records of a scan plus the index of completed (case, hour) keys.
#[derive(Debug)]
pub struct ResultStore {
    dir: PathBuf,
    config_hash: String,
    completed: BTreeMap<String, BTreeSet<usize>>,
    skipped: Vec<SkippedScenario>,
    complete: bool,
}

impl ResultStore {
    /// Creates an empty store, replacing any previous manifest and shards.
    pub fn create(dir: impl AsRef<Path>, config_hash: &str) -> Result<Self, ScanError> {
        let dir = dir.as_ref().to_path_buf();
        let shards = dir.join(SHARDS);
        if shards.exists() {
            fs::remove_dir_all(&shards)?;
        }
        fs::create_dir_all(&shards)?;
        let store = ResultStore {
            dir,
            config_hash: config_hash.to_string(),
            completed: BTreeMap::new(),
            skipped: vec![],
            complete: false,
        };
        store.write_manifest()?;
        Ok(store)
    }

    /// Opens an existing store and trims shard rows the manifest does not
    /// vouch for.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, ScanError> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| ScanError::Store(format!("{}: {e}", path.display())))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| ScanError::Store(format!("{}: {e}", path.display())))?;
        if m.version != FORMAT_VERSION {
            return Err(ScanError::Store(format!("unsupported store version {}", m.version)));
        }
        let store = ResultStore {
            dir,
            config_hash: m.config_hash,
            completed: m.completed.iter().map(|(k, v)| (k.clone(), from_ranges(v))).collect(),
            skipped: m.skipped,
            complete: m.complete,
        };
        fs::create_dir_all(store.dir.join(SHARDS))?;
        store.trim_shards()?;
        Ok(store)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn skipped(&self) -> &[SkippedScenario] {
        &self.skipped
    }

    pub fn is_done(&self, label: &str, hour: usize) -> bool {
        self.completed.get(label).is_some_and(|s| s.contains(&hour))
    }

    pub fn completed_count(&self) -> usize {
        self.completed.values().map(BTreeSet::len).sum()
    }

    pub fn labels(&self) -> Vec<String> {
        self.completed.keys().cloned().collect()
    }

    fn shard_path(&self, label: &str) -> PathBuf {
        self.dir.join(SHARDS).join(format!("{label}.csv"))
    }

    fn shard_labels(&self) -> Result<Vec<String>, ScanError> {
        let mut out = Vec::new();
        for e in fs::read_dir(self.dir.join(SHARDS))? {
            let p = e?.path();
            if p.extension().is_some_and(|x| x == "csv") {
                if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                    out.push(stem.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn read_shard(&self, label: &str) -> Result<Vec<ScanRecord>, ScanError> {
        let path = self.shard_path(label);
        if !path.exists() {
            return Ok(vec![]);
        }
        let file = fs::File::open(&path)?;
        read_records_csv(file).map_err(|e| ScanError::Store(format!("{}: {e}", path.display())))
    }

    fn write_shard(&self, label: &str, records: &[ScanRecord]) -> Result<(), ScanError> {
        let path = self.shard_path(label);
        let tmp = path.with_extension("csv.tmp");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            write_records_csv(&mut w, records)?;
            w.flush()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    fn trim_shards(&self) -> Result<(), ScanError> {
        for label in self.shard_labels()? {
            let rows = self.read_shard(&label)?;
            let keep: Vec<ScanRecord> = rows.iter().filter(|r| self.is_done(&label, r.hour)).cloned().collect();
            // Also drop duplicate keys a crash may have left behind.
            let mut seen = BTreeSet::new();
            let keep: Vec<ScanRecord> =
                keep.into_iter().filter(|r| seen.insert((r.hour, r.meter.clone()))).collect();
            if keep.len() != rows.len() {
                log::info!("{label}: dropping {} uncommitted rows", rows.len() - keep.len());
                self.write_shard(&label, &keep)?;
            }
        }
        Ok(())
    }

    fn write_manifest(&self) -> Result<(), ScanError> {
        let m = Manifest {
            version: FORMAT_VERSION,
            config_hash: self.config_hash.clone(),
            completed: self.completed.iter().map(|(k, v)| (k.clone(), to_ranges(v))).collect(),
            skipped: self.skipped.clone(),
            complete: self.complete,
        };
        let path = self.dir.join(MANIFEST);
        let tmp = self.dir.join("manifest.json.tmp");
        let mut text = serde_json::to_string_pretty(&m).map_err(|e| ScanError::Store(e.to_string()))?;
        text.push('\n');
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    /// Appends one checkpoint's records and marks their (label, hour) keys
    /// complete. `done` lists keys finished in this checkpoint, including
    /// any that produced no record.
    pub fn commit(&mut self, records: &[ScanRecord], done: &[(String, usize)]) -> Result<(), ScanError> {
        let mut by_label: BTreeMap<&str, Vec<&ScanRecord>> = BTreeMap::new();
        for r in records {
            if self.is_done(&r.case_label, r.hour) {
                return Err(ScanError::Store(format!("duplicate record {} hour {}", r.case_label, r.hour)));
            }
            by_label.entry(&r.case_label).or_default().push(r);
        }
        for (label, rows) in by_label {
            let path = self.shard_path(label);
            let fresh = !path.exists();
            let mut w = BufWriter::new(OpenOptions::new().create(true).append(true).open(&path)?);
            if fresh {
                writeln!(w, "{RECORD_CSV_HEADER}")?;
            }
            let owned: Vec<ScanRecord> = rows.into_iter().cloned().collect();
            let mut buf = Vec::new();
            write_records_csv(&mut buf, &owned)?;
            // Skip the header line the writer emits.
            let body = buf.iter().position(|&b| b == b'\n').map_or(&buf[..], |i| &buf[i + 1..]);
            w.write_all(body)?;
            w.flush()?;
        }
        for (label, hour) in done {
            self.completed.entry(label.clone()).or_default().insert(*hour);
        }
        self.write_manifest()
    }

    pub fn record_skip(&mut self, skip: SkippedScenario) -> Result<(), ScanError> {
        if !self.skipped.iter().any(|s| s.scenario == skip.scenario) {
            self.skipped.push(skip);
            self.skipped.sort_by(|a, b| a.scenario.cmp(&b.scenario));
        }
        self.write_manifest()
    }

    /// Rewrites every shard in canonical order and flags the store complete.
    pub fn finish(&mut self) -> Result<(), ScanError> {
        for label in self.shard_labels()? {
            let mut rows = self.read_shard(&label)?;
            sort_records(&mut rows);
            self.write_shard(&label, &rows)?;
        }
        self.complete = true;
        self.write_manifest()
    }

    /// All records, sorted by (label, hour, meter).
    pub fn records(&self) -> Result<Vec<ScanRecord>, ScanError> {
        let mut out = Vec::new();
        for label in self.shard_labels()? {
            out.extend(self.read_shard(&label)?);
        }
        sort_records(&mut out);
        Ok(out)
    }

    /// Every record as one CSV document in canonical order.
    pub fn canonical_csv(&self) -> Result<Vec<u8>, ScanError> {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &self.records()?)?;
        Ok(buf)
    }
}
