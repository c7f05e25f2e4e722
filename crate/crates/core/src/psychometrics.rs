//! Trial responses to per-cell counts, d′ under the optimal criterion, and
//! log-log set-size slopes.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result, TrialIssues};
use crate::formats::{DatasetManifest, ResponseFile, Split};
use crate::normal::normal_quantile;
use crate::stimgen::{Difficulty, TaskKind};

/// Counts for one (task, difficulty, set size) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub set_size: u32,
    pub n_present: u64,
    pub n_absent: u64,
    pub hits: u64,
    pub false_alarms: u64,
    pub pc: f64,
}

impl CellStats {
    pub fn new(
        task: TaskKind,
        difficulty: Difficulty,
        set_size: u32,
        n_present: u64,
        n_absent: u64,
        hits: u64,
        false_alarms: u64,
    ) -> Result<Self> {
        if hits > n_present || false_alarms > n_absent {
            return Err(Error::InvalidParameter(format!(
                "cell {task}/{difficulty}/n={set_size}: hits {hits}/{n_present}, \
                 false alarms {false_alarms}/{n_absent}"
            )));
        }
        if n_present + n_absent == 0 {
            return Err(Error::InvalidParameter(format!(
                "cell {task}/{difficulty}/n={set_size} has no trials"
            )));
        }
        if set_size == 0 {
            return Err(Error::InvalidParameter("set size must be at least 1".into()));
        }
        let correct = hits + (n_absent - false_alarms);
        Ok(Self {
            task,
            difficulty,
            set_size,
            n_present,
            n_absent,
            hits,
            false_alarms,
            pc: correct as f64 / (n_present + n_absent) as f64,
        })
    }

    pub fn n_trials(&self) -> u64 {
        self.n_present + self.n_absent
    }

    pub fn misses(&self) -> u64 {
        self.n_present - self.hits
    }

    pub fn correct_rejections(&self) -> u64 {
        self.n_absent - self.false_alarms
    }

    /// Same cell with every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        Self {
            n_present: self.n_present * k,
            n_absent: self.n_absent * k,
            hits: self.hits * k,
            false_alarms: self.false_alarms * k,
            ..*self
        }
    }

    pub fn dprime(&self) -> Result<DPrimePoint> {
        let (dprime, clamped) = pc_to_dprime(self.pc, self.n_trials())?;
        Ok(DPrimePoint {
            set_size: self.set_size,
            dprime,
            clamped,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DPrimePoint {
    pub set_size: u32,
    pub dprime: f64,
    /// The proportion correct was pulled in to the 1/(2N) bounds.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
}

/// Joins test-split responses to the manifest and counts each cell.
///
/// Cells come back sorted by task, difficulty, then set size.
pub fn aggregate_cells(manifest: &DatasetManifest, responses: &ResponseFile) -> Result<Vec<CellStats>> {
    let mut by_id = HashMap::with_capacity(manifest.len());
    for row in &manifest.rows {
        by_id.insert(row.trial_id.as_str(), row);
    }

    let mut issues = TrialIssues::default();
    let mut seen: HashSet<&str> = HashSet::with_capacity(responses.len());
    let mut answered = Vec::with_capacity(responses.len());
    for rec in &responses.records {
        let id = rec.trial_id.as_str();
        match by_id.get(id) {
            None => issues.unknown.push(id.to_string()),
            Some(row) if row.split != Split::Test => issues.not_test.push(id.to_string()),
            Some(row) => {
                if seen.insert(id) {
                    answered.push((*row, rec.response));
                } else {
                    issues.duplicate.push(id.to_string());
                }
            }
        }
    }
    issues.missing = manifest
        .test_rows()
        .filter(|r| !seen.contains(r.trial_id.as_str()))
        .map(|r| r.trial_id.clone())
        .collect();
    issues.duplicate.dedup();
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }

    #[derive(Default)]
    struct Tally {
        present: u64,
        absent: u64,
        hits: u64,
        false_alarms: u64,
    }
    let mut cells: BTreeMap<(TaskKind, Difficulty, u32), Tally> = BTreeMap::new();
    for (row, response) in answered {
        let t = cells
            .entry((row.task, row.difficulty, row.set_size))
            .or_default();
        if row.target_present {
            t.present += 1;
            t.hits += u64::from(response.is_present());
        } else {
            t.absent += 1;
            t.false_alarms += u64::from(response.is_present());
        }
    }
    cells
        .into_iter()
        .map(|((task, difficulty, n), t)| {
            CellStats::new(task, difficulty, n, t.present, t.absent, t.hits, t.false_alarms)
        })
        .collect()
}

/// d′ = 2·Φ⁻¹(pc): the yes/no sensitivity of an unbiased observer whose
/// criterion sits midway between the noise and signal distributions.
///
/// `pc` is first clamped into `[1/(2N), 1 − 1/(2N)]`; the flag reports
/// whether that moved it.
pub fn pc_to_dprime(pc: f64, n_trials: u64) -> Result<(f64, bool)> {
    if !(0.0..=1.0).contains(&pc) {
        return Err(Error::InvalidParameter(format!(
            "proportion correct {pc} outside [0, 1]"
        )));
    }
    if n_trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let lo = 1.0 / (2.0 * n_trials as f64);
    let hi = 1.0 - lo;
    let clamped = pc < lo || pc > hi;
    let p = pc.clamp(lo, hi);
    // n_trials = 1 collapses the bounds to 0.5
    if p == 0.5 {
        return Ok((0.0, clamped));
    }
    Ok((2.0 * normal_quantile(p)?, clamped))
}

/// OLS fit of ln d′ on ln n over the points with d′ > 0.
pub fn loglog_slope(points: &[DPrimePoint]) -> Result<SlopeEstimate> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.dprime > 0.0 && p.dprime.is_finite() && p.set_size >= 1)
        .map(|p| (f64::from(p.set_size).ln(), p.dprime.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "log-log slope needs two points with d' > 0, have {}",
            usable.len()
        )));
    }
    let k = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "log-log slope needs at least two distinct set sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(SlopeEstimate {
        slope,
        intercept: mean_y - slope * mean_x,
        points_used: usable.len(),
    })
}

/// Cells grouped by (task, difficulty), each group in set-size order.
pub fn group_by_condition(cells: &[CellStats]) -> BTreeMap<(TaskKind, Difficulty), Vec<CellStats>> {
    let mut groups: BTreeMap<(TaskKind, Difficulty), Vec<CellStats>> = BTreeMap::new();
    for c in cells {
        groups.entry((c.task, c.difficulty)).or_default().push(*c);
    }
    for g in groups.values_mut() {
        g.sort_by_key(|c| c.set_size);
    }
    groups
}
