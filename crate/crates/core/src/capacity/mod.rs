//! Set-size capacity model: max-rule predictions and the maximum-likelihood
//! capacity fit.

mod fit;
mod model;

pub use fit::{
    fit_capacity, neg_log_likelihood, CapacityFit, FitOptions, ModelParams, ALPHA_MAX, ALPHA_MIN,
    D1_SEARCH_MAX,
};
pub use model::{
    evaluate, item_dprime, optimal_criterion, optimal_criterion_for, predicted_pc,
    predicted_rates, rates_at, ModelEval, Rates, CRITERION_BRACKET_LO, CRITERION_BRACKET_SPAN,
    CRITERION_TOL,
};
