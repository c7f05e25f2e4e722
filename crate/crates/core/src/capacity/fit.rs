//! Maximum-likelihood fit of one capacity exponent shared across difficulty
//! levels, with a separate single-item sensitivity per level.

use std::collections::{BTreeMap, BTreeSet};

use super::model::{item_dprime, optimal_criterion_for, rates_at};
use crate::error::{Error, Result};
use crate::optimize::{golden_section_min, nelder_mead, NelderMeadOptions};
use crate::psychometrics::CellStats;
use crate::stimgen::Difficulty;

pub const ALPHA_MIN: f64 = 0.0;
pub const ALPHA_MAX: f64 = 2.0;
/// Upper end of the per-level d1 search in the grid stage.
pub const D1_SEARCH_MAX: f64 = 15.0;
const RATE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub d1_by_difficulty: BTreeMap<Difficulty, f64>,
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(d1_by_difficulty: BTreeMap<Difficulty, f64>, alpha: f64) -> Result<Self> {
        if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha {alpha} outside [{ALPHA_MIN}, {ALPHA_MAX}]"
            )));
        }
        if let Some((d, v)) = d1_by_difficulty
            .iter()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidParameter(format!("d1 for level {d} is {v}")));
        }
        Ok(Self {
            d1_by_difficulty,
            alpha,
        })
    }

    pub fn single(d1: f64, alpha: f64, level: Difficulty) -> Result<Self> {
        Self::new(BTreeMap::from([(level, d1)]), alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub alpha_grid: Vec<f64>,
    pub nelder_mead: NelderMeadOptions,
    /// Bracket tolerance of the per-level d1 searches in the grid stage.
    pub d1_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            alpha_grid: (0..=15).map(|i| f64::from(i) / 10.0).collect(),
            nelder_mead: NelderMeadOptions::default(),
            d1_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityFit {
    pub params: ModelParams,
    pub neg_log_likelihood: f64,
    pub converged: bool,
    /// Objective evaluations spent in the simplex stage.
    pub evaluations: usize,
    /// (α, profile NLL) from the grid stage.
    pub alpha_profile: Vec<(f64, f64)>,
}

/// Binomial negative log-likelihood of one cell at the model's optimal
/// criterion.
fn cell_nll(cell: &CellStats, d1: f64, alpha: f64) -> Result<f64> {
    let n = cell.set_size;
    let d_n = item_dprime(d1, alpha, n);
    let c = optimal_criterion_for(d_n, n)?;
    let r = rates_at(d_n, n, c);
    let ln = |p: f64| p.clamp(RATE_FLOOR, 1.0 - RATE_FLOOR).ln();
    let term = |k: u64, p: f64| if k == 0 { 0.0 } else { k as f64 * ln(p) };
    Ok(-(term(cell.hits, r.hit)
        + term(cell.misses(), r.miss)
        + term(cell.false_alarms, r.false_alarm)
        + term(cell.correct_rejections(), r.correct_rejection)))
}

/// Σ over cells of −[h ln H + m ln(1−H) + f ln FA + cr ln(1−FA)].
pub fn neg_log_likelihood(params: &ModelParams, cells: &[CellStats]) -> Result<f64> {
    let mut total = 0.0;
    for cell in cells {
        let d1 = *params.d1_by_difficulty.get(&cell.difficulty).ok_or_else(|| {
            Error::ParameterShape(format!("no d1 for difficulty level {}", cell.difficulty))
        })?;
        total += cell_nll(cell, d1, params.alpha)?;
    }
    Ok(total)
}

fn level_nll(cells: &[CellStats], d1: f64, alpha: f64) -> f64 {
    cells
        .iter()
        .map(|c| cell_nll(c, d1, alpha).unwrap_or(f64::INFINITY))
        .sum()
}

/// Two-stage fit: an α grid with per-level 1-D d1 searches, then
/// Nelder–Mead over (d1 per level, α) from the best grid point.
pub fn fit_capacity(cells: &[CellStats], options: &FitOptions) -> Result<CapacityFit> {
    if cells.is_empty() {
        return Err(Error::InsufficientData("no cells to fit".into()));
    }
    let tasks: BTreeSet<_> = cells.iter().map(|c| c.task).collect();
    if tasks.len() > 1 {
        return Err(Error::InvalidParameter(format!(
            "cells span {} tasks; fit one task at a time",
            tasks.len()
        )));
    }
    let set_sizes: BTreeSet<u32> = cells.iter().map(|c| c.set_size).collect();
    if set_sizes.len() < 2 {
        return Err(Error::InsufficientData(
            "the capacity fit needs at least two distinct set sizes".into(),
        ));
    }
    if options.alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("empty alpha grid".into()));
    }

    let mut by_level: BTreeMap<Difficulty, Vec<CellStats>> = BTreeMap::new();
    for c in cells {
        by_level.entry(c.difficulty).or_default().push(*c);
    }
    let levels: Vec<Difficulty> = by_level.keys().copied().collect();

    let mut profile = Vec::with_capacity(options.alpha_grid.len());
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for &alpha in &options.alpha_grid {
        let alpha = alpha.clamp(ALPHA_MIN, ALPHA_MAX);
        let mut total = 0.0;
        let mut d1s = Vec::with_capacity(levels.len());
        for level in &levels {
            let group = &by_level[level];
            let line = golden_section_min(
                |d1| level_nll(group, d1, alpha),
                0.0,
                D1_SEARCH_MAX,
                options.d1_tol,
            );
            total += line.fx;
            d1s.push(line.x);
        }
        profile.push((alpha, total));
        if best.as_ref().is_none_or(|b| total < b.2) {
            best = Some((alpha, d1s, total));
        }
    }
    let (alpha0, d1s0, _) = best.expect("grid is non-empty");

    let dim = levels.len() + 1;
    let mut x0 = d1s0;
    x0.push(alpha0);
    let mut steps: Vec<f64> = x0[..dim - 1].iter().map(|d| 0.1 * d.max(1.0)).collect();
    steps.push(0.05);

    let objective = |x: &[f64]| {
        let alpha = x[dim - 1];
        levels
            .iter()
            .zip(x)
            .map(|(level, &d1)| level_nll(&by_level[level], d1, alpha))
            .sum::<f64>()
    };
    let project = |x: &mut [f64]| {
        let (d1s, alpha) = x.split_at_mut(dim - 1);
        for d in d1s {
            *d = d.max(0.0);
        }
        alpha[0] = alpha[0].clamp(ALPHA_MIN, ALPHA_MAX);
    };
    let nm = nelder_mead(objective, &x0, &steps, project, options.nelder_mead);

    let params = ModelParams::new(
        levels.iter().copied().zip(nm.x[..dim - 1].iter().copied()).collect(),
        nm.x[dim - 1],
    )?;
    let nll = neg_log_likelihood(&params, cells)?;
    Ok(CapacityFit {
        params,
        neg_log_likelihood: nll,
        converged: nm.converged && nll.is_finite(),
        evaluations: nm.evaluations,
        alpha_profile: profile,
    })
}
