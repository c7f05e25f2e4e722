//! Visual-search psychophysics: stimulus datasets, capacity-limited
//! signal-detection observers, d′ set-size analysis, and maximum-likelihood
//! fitting of the capacity exponent.
//!
//! The pipeline runs `stimgen` → (any observer, e.g. [`observer`]) →
//! [`psychometrics`] → [`capacity`] → [`report`]. Observers and the
//! analysis meet only through the response CSV in [`formats`].

pub mod capacity;
pub mod error;
pub mod formats;
pub mod normal;
pub mod observer;
pub mod optimize;
pub mod psychometrics;
pub mod report;
pub mod rng;
pub mod stimgen;

pub use capacity::{fit_capacity, CapacityFit, FitOptions, ModelEval, ModelParams};
pub use error::{Error, Result, TrialIssues};
pub use formats::{DatasetManifest, FitReport, ManifestRow, Response, ResponseFile, ResponseRecord, Split};
pub use normal::{normal_cdf, normal_quantile};
pub use observer::{simulate_observer, CriterionPolicy, ObserverParams};
pub use psychometrics::{aggregate_cells, loglog_slope, pc_to_dprime, CellStats, DPrimePoint, SlopeEstimate};
pub use stimgen::{generate_dataset, plan_display, render_display, Difficulty, DisplaySpec, Image, ItemSpec, TaskKind};
