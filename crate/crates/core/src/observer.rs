//! Simulated capacity-limited observers that answer a manifest's test trials.
//!
//! Samples are in standardized units: distractors ~ N(0, 1), the target
//! ~ N(d_n, 1) with d_n = d1·n^(−α/2). That is the raw-variance model
//! σ²(n) = n^α rescaled, which leaves the max-rule decision unchanged.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::capacity::{item_dprime, optimal_criterion_for, ALPHA_MAX, ALPHA_MIN};
use crate::error::{Error, Result};
use crate::formats::{DatasetManifest, Response, ResponseFile, ResponseRecord};
use crate::rng;
use crate::stimgen::Difficulty;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionPolicy {
    /// Per set size, the criterion that maximizes proportion correct.
    Optimal,
    /// One criterion in standardized units for every set size.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverParams {
    pub d1: f64,
    pub alpha: f64,
    pub criterion: CriterionPolicy,
    pub seed: u64,
}

impl ObserverParams {
    pub fn new(d1: f64, alpha: f64, criterion: CriterionPolicy, seed: u64) -> Result<Self> {
        if !d1.is_finite() || d1 < 0.0 {
            return Err(Error::InvalidParameter(format!("d1 must be finite and >= 0, got {d1}")));
        }
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {alpha}"
            )));
        }
        if let CriterionPolicy::Fixed(c) = criterion {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("fixed criterion {c} is not finite")));
            }
        }
        Ok(Self {
            d1,
            alpha,
            criterion,
            seed,
        })
    }

    pub fn item_dprime(&self, n: u32) -> f64 {
        item_dprime(self.d1, self.alpha, n)
    }

    /// Decision criterion used at set size `n`.
    pub fn criterion_at(&self, n: u32) -> Result<f64> {
        match self.criterion {
            CriterionPolicy::Fixed(c) => Ok(c),
            CriterionPolicy::Optimal => optimal_criterion_for(self.item_dprime(n), n),
        }
    }
}

/// Outcome of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub response: Response,
    /// Largest item sample (the decision variable).
    pub max_sample: f64,
}

/// Draws `n` item samples and applies the max rule at `criterion`.
pub fn sample_with_criterion<R: Rng + ?Sized>(
    d_n: f64,
    n: u32,
    target_present: bool,
    criterion: f64,
    rng: &mut R,
) -> TrialOutcome {
    let mut max_sample = f64::NEG_INFINITY;
    for i in 0..n {
        let noise: f64 = rng.sample(StandardNormal);
        let x = if target_present && i == 0 { noise + d_n } else { noise };
        max_sample = max_sample.max(x);
    }
    TrialOutcome {
        response: Response::from(max_sample > criterion),
        max_sample,
    }
}

/// One trial for `params` at set size `n`.
pub fn sample_trial<R: Rng + ?Sized>(
    params: &ObserverParams,
    n: u32,
    target_present: bool,
    rng: &mut R,
) -> Result<TrialOutcome> {
    if n == 0 {
        return Err(Error::InvalidParameter("set size must be at least 1".into()));
    }
    let c = params.criterion_at(n)?;
    Ok(sample_with_criterion(params.item_dprime(n), n, target_present, c, rng))
}

/// Seed of the private stream for one trial.
pub fn trial_stream_seed(observer_seed: u64, trial_id: &str) -> u64 {
    rng::derive_seed(observer_seed, &[rng::stable_hash(trial_id)])
}

/// Answers every test row of `manifest` with one observer.
pub fn simulate_observer(params: &ObserverParams, manifest: &DatasetManifest) -> Result<ResponseFile> {
    simulate_with(manifest, |_| Some(params), false)
}

/// Like [`simulate_observer`] but with an observer per difficulty level.
/// Every difficulty in the test split must have an entry.
pub fn simulate_observer_by_level(
    params: &BTreeMap<Difficulty, ObserverParams>,
    manifest: &DatasetManifest,
    with_scores: bool,
) -> Result<ResponseFile> {
    simulate_with(manifest, |d| params.get(&d), with_scores)
}

fn simulate_with<'p, F>(manifest: &DatasetManifest, lookup: F, with_scores: bool) -> Result<ResponseFile>
where
    F: Fn(Difficulty) -> Option<&'p ObserverParams> + Sync,
{
    let rows: Vec<_> = manifest.test_rows().collect();

    // criteria depend only on (observer, set size); compute each once
    let mut criteria: HashMap<(Difficulty, u32), f64> = HashMap::new();
    for row in &rows {
        let key = (row.difficulty, row.set_size);
        if criteria.contains_key(&key) {
            continue;
        }
        let p = lookup(row.difficulty).ok_or_else(|| {
            Error::ParameterShape(format!("no observer for difficulty level {}", row.difficulty))
        })?;
        criteria.insert(key, p.criterion_at(row.set_size)?);
    }

    let records = rows
        .par_iter()
        .map(|row| {
            let p = lookup(row.difficulty).expect("checked above");
            let c = criteria[&(row.difficulty, row.set_size)];
            let mut stream = rng::stream(trial_stream_seed(p.seed, &row.trial_id));
            let out = sample_with_criterion(
                p.item_dprime(row.set_size),
                row.set_size,
                row.target_present,
                c,
                &mut stream,
            );
            ResponseRecord {
                trial_id: row.trial_id.clone(),
                response: out.response,
                score: with_scores.then_some(out.max_sample),
            }
        })
        .collect();
    Ok(ResponseFile::new(records))
}
