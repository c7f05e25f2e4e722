use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::{CapacityFit, ModelParams};
use crate::error::{Error, Result};
use crate::psychometrics::{CellStats, DPrimePoint, SlopeEstimate};
use crate::stimgen::{Difficulty, TaskKind};

pub const CELLS_HEADER: &str =
    "task,difficulty,set_size,n_present,n_absent,hits,false_alarms,pc,dprime,clamped";
pub const DPRIME_HEADER: &str = "task,difficulty,set_size,dprime,clamped";
pub const SLOPES_HEADER: &str = "task,difficulty,slope,intercept,points_used";

pub fn cells_csv(cells: &[CellStats]) -> Result<String> {
    let mut out = String::from(CELLS_HEADER);
    out.push('\n');
    for c in cells {
        let dp = c.dprime()?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.task,
            c.difficulty,
            c.set_size,
            c.n_present,
            c.n_absent,
            c.hits,
            c.false_alarms,
            c.pc,
            dp.dprime,
            dp.clamped
        )
        .expect("write to String");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DPrimeRow {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub point: DPrimePoint,
}

pub fn dprime_rows(cells: &[CellStats]) -> Result<Vec<DPrimeRow>> {
    cells
        .iter()
        .map(|c| {
            Ok(DPrimeRow {
                task: c.task,
                difficulty: c.difficulty,
                point: c.dprime()?,
            })
        })
        .collect()
}

pub fn dprime_csv(rows: &[DPrimeRow]) -> String {
    let mut out = String::from(DPRIME_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.task, r.difficulty, r.point.set_size, r.point.dprime, r.point.clamped
        )
        .expect("write to String");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeRow {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub estimate: SlopeEstimate,
}

pub fn slopes_csv(rows: &[SlopeRow]) -> String {
    let mut out = String::from(SLOPES_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.task, r.difficulty, r.estimate.slope, r.estimate.intercept, r.estimate.points_used
        )
        .expect("write to String");
    }
    out
}

#[derive(Deserialize)]
struct CellCsvRow {
    task: TaskKind,
    difficulty: Difficulty,
    set_size: u32,
    n_present: u64,
    n_absent: u64,
    hits: u64,
    false_alarms: u64,
}

#[derive(Deserialize)]
struct DPrimeCsvRow {
    task: TaskKind,
    difficulty: Difficulty,
    set_size: u32,
    dprime: f64,
    clamped: bool,
}

fn read_csv<T, R>(reader: R, origin: &Path) -> Result<Vec<(usize, T)>>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(origin, 1, e.to_string()))?
        .clone();
    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(origin, line, e.to_string()))?;
        rows.push((line, row));
    }
    Ok(rows)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Reads the count columns of a cells CSV; `pc` is recomputed.
pub fn read_cells_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<CellStats>> {
    read_csv::<CellCsvRow, _>(reader, origin)?
        .into_iter()
        .map(|(line, r)| {
            CellStats::new(
                r.task,
                r.difficulty,
                r.set_size,
                r.n_present,
                r.n_absent,
                r.hits,
                r.false_alarms,
            )
            .map_err(|e| Error::parse(origin, line, e.to_string()))
        })
        .collect()
}

pub fn read_cells(path: &Path) -> Result<Vec<CellStats>> {
    read_cells_csv(open(path)?, path)
}

pub fn read_dprime_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<DPrimeRow>> {
    Ok(read_csv::<DPrimeCsvRow, _>(reader, origin)?
        .into_iter()
        .map(|(_, r)| DPrimeRow {
            task: r.task,
            difficulty: r.difficulty,
            point: DPrimePoint {
                set_size: r.set_size,
                dprime: r.dprime,
                clamped: r.clamped,
            },
        })
        .collect())
}

pub fn read_dprime(path: &Path) -> Result<Vec<DPrimeRow>> {
    read_dprime_csv(open(path)?, path)
}

/// JSON form of a capacity fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha: f64,
    /// Keyed by difficulty level.
    pub d1: BTreeMap<String, f64>,
    pub nll: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub alpha_profile: Vec<[f64; 2]>,
}

impl From<&CapacityFit> for FitReport {
    fn from(fit: &CapacityFit) -> Self {
        Self {
            alpha: fit.params.alpha,
            d1: fit
                .params
                .d1_by_difficulty
                .iter()
                .map(|(d, v)| (d.to_string(), *v))
                .collect(),
            nll: fit.neg_log_likelihood,
            converged: fit.converged,
            evaluations: fit.evaluations,
            alpha_profile: fit.alpha_profile.iter().map(|&(a, v)| [a, v]).collect(),
        }
    }
}

impl FitReport {
    pub fn params(&self) -> Result<ModelParams> {
        let mut d1 = BTreeMap::new();
        for (k, v) in &self.d1 {
            let level: u8 = k
                .parse()
                .map_err(|_| Error::ParameterShape(format!("d1 key '{k}' is not a level")))?;
            d1.insert(Difficulty::new(level)?, *v);
        }
        ModelParams::new(d1, self.alpha)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}
