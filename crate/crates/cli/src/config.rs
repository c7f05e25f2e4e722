//! Optional JSON experiment config. Command-line flags override its values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use vsl_core::capacity::FitOptions;
use vsl_core::stimgen::{Difficulty, TaskKind};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Option<TaskKind>,
    #[serde(default)]
    pub difficulties: Vec<Difficulty>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub observer: Option<ObserverConfig>,
    pub fit: Option<FitConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    /// A single value, or one per difficulty level keyed "1", "2", "3".
    pub d1: Option<D1Config>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub criterion: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum D1Config {
    All(f64),
    PerLevel(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub alpha_grid: Option<Vec<f64>>,
    pub diameter_tol: Option<f64>,
    pub max_evaluations: Option<usize>,
    pub d1_tol: Option<f64>,
}

impl FitConfig {
    pub fn options(&self) -> FitOptions {
        let mut o = FitOptions::default();
        if let Some(grid) = &self.alpha_grid {
            o.alpha_grid = grid.clone();
        }
        if let Some(tol) = self.diameter_tol {
            o.nelder_mead.diameter_tol = tol;
        }
        if let Some(max) = self.max_evaluations {
            o.nelder_mead.max_evaluations = max;
        }
        if let Some(tol) = self.d1_tol {
            o.d1_tol = tol;
        }
        o
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| crate::Usage(format!("{}:{}: {e}", path.display(), e.line())).into())
    }
}
