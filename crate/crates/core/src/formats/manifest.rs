use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stimgen::{Difficulty, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// One trial of a generated dataset. Field order is the JSONL column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub trial_id: String,
    pub split: Split,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub set_size: u32,
    pub target_present: bool,
    /// Relative to the manifest's directory.
    pub image_path: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetManifest {
    pub rows: Vec<ManifestRow>,
}

impl DatasetManifest {
    pub fn new(rows: Vec<ManifestRow>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn test_rows(&self) -> impl Iterator<Item = &ManifestRow> {
        self.rows.iter().filter(|r| r.split == Split::Test)
    }

    pub fn extend(&mut self, other: DatasetManifest) {
        self.rows.extend(other.rows);
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), path)
    }

    /// Parses JSON Lines; `origin` labels errors. Blank lines are skipped.
    pub fn from_reader<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let row: ManifestRow = serde_json::from_str(&line)
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
            if row.set_size == 0 {
                return Err(Error::parse(origin, line_no, "set_size must be at least 1"));
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in &self.rows {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.to_writer(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}
