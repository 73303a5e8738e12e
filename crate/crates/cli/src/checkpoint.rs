//! Per-grid-point checkpointing so interrupted sweeps resume.
//!
//! A sidecar `.partial.jsonl` file stores one JSON line per completed
//! grid point (its final CSV row). On startup the file is replayed if
//! its header matches the current experiment identity; stale partials
//! are discarded.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    experiment: String,
    seed: u64,
    config: String,
}

impl Header {
    /// Identity comparison; config strings match if they parse to the
    /// same TOML value, so key order and formatting do not matter.
    fn matches(&self, other: &Header) -> bool {
        if self.experiment != other.experiment || self.seed != other.seed {
            return false;
        }
        match (
            toml::from_str::<toml::Value>(&self.config),
            toml::from_str::<toml::Value>(&other.config),
        ) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RowRecord {
    i: usize,
    row: String,
}

pub struct Checkpoint {
    path: PathBuf,
    done: BTreeMap<usize, String>,
    file: std::fs::File,
}

impl Checkpoint {
    /// Open (or resume) the checkpoint for one sweep. `config` is the
    /// serialized experiment table; any mismatch discards old progress.
    pub fn open(out_csv: &Path, experiment: &str, seed: u64, config: &str) -> anyhow::Result<Self> {
        let path = out_csv.with_extension("partial.jsonl");
        let header = Header {
            experiment: experiment.to_string(),
            seed,
            config: config.to_string(),
        };
        let mut done = BTreeMap::new();
        if let Ok(text) = std::fs::read_to_string(&path) {
            let mut lines = text.lines();
            let matches = lines
                .next()
                .and_then(|l| serde_json::from_str::<Header>(l).ok())
                .map(|h| h.matches(&header))
                .unwrap_or(false);
            if matches {
                for line in lines {
                    if let Ok(rec) = serde_json::from_str::<RowRecord>(line) {
                        done.insert(rec.i, rec.row);
                    }
                }
            }
        }
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(true)
            .open(&path)
            .with_context(|| format!("opening checkpoint {}", path.display()))?;
        serde_json::to_writer(&mut file, &header)?;
        file.write_all(b"\n")?;
        for (i, row) in &done {
            serde_json::to_writer(&mut file, &RowRecord { i: *i, row: row.clone() })?;
            file.write_all(b"\n")?;
        }
        file.flush()?;
        Ok(Self { path, done, file })
    }

    /// Previously computed CSV row for a grid index, if any.
    pub fn get(&self, i: usize) -> Option<String> {
        self.done.get(&i).cloned()
    }

    pub fn completed(&self) -> usize {
        self.done.len()
    }

    /// Record a freshly computed row and flush it to disk.
    pub fn record(&mut self, i: usize, row: String) -> anyhow::Result<()> {
        serde_json::to_writer(&mut self.file, &RowRecord { i, row: row.clone() })?;
        self.file.write_all(b"\n")?;
        self.file.flush()?;
        self.done.insert(i, row);
        Ok(())
    }

    /// Sweep finished: remove the sidecar.
    pub fn finish(self) -> anyhow::Result<()> {
        drop(self.file);
        std::fs::remove_file(&self.path)
            .with_context(|| format!("removing checkpoint {}", self.path.display()))
    }
}
