//! Resumable scan checkpoints: a line-delimited log with one self-contained
//! JSON record per completed work item. Records carry a schema version, the
//! scan kind and its bounds, the chunk range, the hits found there, and a
//! content checksum; loading skips anything that fails to parse or verify —
//! in particular the partial final line an interrupted run leaves behind.
//!
//! Field order is fixed by the struct declarations below, so two logs of the
//! same scan diff cleanly line-by-line.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, LineWriter, Write};
use std::path::Path;
use std::sync::Mutex;

pub const CHECKPOINT_SCHEMA: u32 = 1;

/// Hit as stored in a checkpoint line. Brocard roots exceed u64, so they are
/// kept as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedHit {
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub root: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub schema: u32,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_max: Option<u64>,
    pub lo: u64,
    pub hi: u64,
    pub hits: Vec<RecordedHit>,
    pub checksum: String,
}

impl CheckpointRecord {
    /// First 16 hex chars of SHA-256 over the record serialized with an
    /// empty checksum field.
    fn computed_checksum(&self) -> String {
        let mut unsigned = self.clone();
        unsigned.checksum = String::new();
        let body = serde_json::to_string(&unsigned).expect("record serializes");
        let digest = Sha256::digest(body.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seal(mut self) -> CheckpointRecord {
        self.checksum = self.computed_checksum();
        self
    }

    pub fn verifies(&self) -> bool {
        self.schema == CHECKPOINT_SCHEMA && self.checksum == self.computed_checksum()
    }
}

/// Identity of a work item: (kind, n_max, p_max, lo, hi). A resumed run must
/// present the same scan bounds for its chunks to count as completed.
type ItemKey = (String, Option<u64>, Option<u64>, u64, u64);

pub struct CheckpointLog {
    completed: HashMap<ItemKey, Vec<RecordedHit>>,
    writer: Mutex<LineWriter<File>>,
}

impl CheckpointLog {
    /// Opens (creating if absent) a log and loads every record that parses
    /// and checksums; invalid lines are discarded silently. New records
    /// append to the same file.
    pub fn open(path: &Path) -> std::io::Result<CheckpointLog> {
        let mut completed = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                let Ok(record) = serde_json::from_str::<CheckpointRecord>(&line) else {
                    continue;
                };
                if record.verifies() {
                    let key =
                        (record.kind, record.n_max, record.p_max, record.lo, record.hi);
                    completed.insert(key, record.hits);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(CheckpointLog { completed, writer: Mutex::new(LineWriter::new(file)) })
    }

    pub fn lookup(
        &self,
        kind: &str,
        n_max: Option<u64>,
        p_max: Option<u64>,
        lo: u64,
        hi: u64,
    ) -> Option<&[RecordedHit]> {
        self.completed
            .get(&(kind.to_string(), n_max, p_max, lo, hi))
            .map(Vec::as_slice)
    }

    /// Seals and appends one record; flushed per line so an interruption
    /// loses at most the line being written.
    pub fn record(&self, record: CheckpointRecord) -> std::io::Result<()> {
        let sealed = record.seal();
        let line = serde_json::to_string(&sealed).expect("record serializes");
        let mut writer = self.writer.lock().expect("checkpoint writer poisoned");
        writeln!(writer, "{line}")
    }
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(lo: u64, hits: Vec<RecordedHit>) -> CheckpointRecord {
        CheckpointRecord {
            schema: CHECKPOINT_SCHEMA,
            kind: "square-divisors".into(),
            n_max: Some(600),
            p_max: Some(10_000),
            lo,
            hi: lo + 1024,
            hits,
            checksum: String::new(),
        }
    }

    #[test]
    fn roundtrip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        {
            let log = CheckpointLog::open(&path).unwrap();
            log.record(sample(2, vec![RecordedHit { n: 4, p: Some(5), root: None }]))
                .unwrap();
            log.record(sample(1026, vec![])).unwrap();
        }
        let log = CheckpointLog::open(&path).unwrap();
        let hits = log.lookup("square-divisors", Some(600), Some(10_000), 2, 1026).unwrap();
        assert_eq!(hits, &[RecordedHit { n: 4, p: Some(5), root: None }]);
        assert!(log
            .lookup("square-divisors", Some(600), Some(10_000), 1026, 2050)
            .is_some());
        // Different scan bounds are a different identity.
        assert!(log.lookup("square-divisors", Some(600), Some(9999), 2, 1026).is_none());
        assert!(log.lookup("wilson", Some(600), Some(10_000), 2, 1026).is_none());
    }

    #[test]
    fn field_order_is_canonical() {
        let line = serde_json::to_string(&sample(2, vec![]).seal()).unwrap();
        assert!(
            line.starts_with(r#"{"schema":1,"kind":"square-divisors","n_max":600,"p_max":10000,"lo":2,"hi":1026,"hits":[],"checksum":""#),
            "unexpected serialization: {line}"
        );
    }

    #[test]
    fn checksum_is_deterministic_and_tamper_evident() {
        let a = sample(2, vec![RecordedHit { n: 4, p: Some(5), root: None }]).seal();
        let b = sample(2, vec![RecordedHit { n: 4, p: Some(5), root: None }]).seal();
        assert_eq!(a.checksum, b.checksum);
        assert_eq!(a.checksum.len(), 16);
        assert!(a.verifies());

        let mut tampered = a.clone();
        tampered.hits[0].n = 5;
        assert!(!tampered.verifies());
    }

    #[test]
    fn invalid_lines_are_discarded_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let good = serde_json::to_string(&sample(2, vec![]).seal()).unwrap();
        let tampered = good.replace("\"hi\":1026", "\"hi\":1027");
        let mut contents = String::new();
        contents.push_str(&good);
        contents.push('\n');
        contents.push_str("not json at all\n");
        contents.push_str(&tampered);
        contents.push('\n');
        // Interrupted write: final line has no newline and is cut short.
        contents.push_str(&good[..good.len() / 2]);
        std::fs::write(&path, contents).unwrap();

        let log = CheckpointLog::open(&path).unwrap();
        assert!(log.lookup("square-divisors", Some(600), Some(10_000), 2, 1026).is_some());
        assert!(log.lookup("square-divisors", Some(600), Some(10_000), 2, 1027).is_none());
    }
}
