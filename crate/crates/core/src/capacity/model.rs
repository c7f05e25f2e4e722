//! Max-rule signal-detection predictions for yes/no visual search.
//!
//! Each of the `n` items yields a unit-variance internal sample; the target
//! sample is shifted by the item sensitivity `d_n = d1 · n^(−α/2)`. The
//! observer answers "present" when the largest sample exceeds the criterion.

use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_ln_cdf};
use crate::optimize::{bisect_root, golden_section_min};

/// Lower end of the criterion search bracket.
pub const CRITERION_BRACKET_LO: f64 = -2.0;
/// The bracket extends this far above `d_n`.
pub const CRITERION_BRACKET_SPAN: f64 = 8.0;
pub const CRITERION_TOL: f64 = 1e-6;

/// Per-item sensitivity at set size `n`.
pub fn item_dprime(d1: f64, alpha: f64, n: u32) -> f64 {
    d1 * f64::from(n).powf(-alpha / 2.0)
}

/// Response probabilities for one (d_n, n, criterion) configuration.
///
/// All four rates are computed directly so that small complements keep
/// their relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub hit: f64,
    pub miss: f64,
    pub false_alarm: f64,
    pub correct_rejection: f64,
}

impl Rates {
    pub fn pc(&self) -> f64 {
        (self.hit + self.correct_rejection) / 2.0
    }
}

/// Rates for item sensitivity `d_n` at criterion `c`:
/// H = 1 − Φ(c − d_n)·Φ(c)^(n−1), FA = 1 − Φ(c)^n.
pub fn rates_at(d_n: f64, n: u32, c: f64) -> Rates {
    let ln_phi_c = normal_ln_cdf(c);
    let ln_miss = normal_ln_cdf(c - d_n) + f64::from(n - 1) * ln_phi_c;
    let ln_cr = f64::from(n) * ln_phi_c;
    Rates {
        hit: -ln_miss.exp_m1(),
        miss: ln_miss.exp(),
        false_alarm: -ln_cr.exp_m1(),
        correct_rejection: ln_cr.exp(),
    }
}

/// Hit and false-alarm rates at criterion `c`.
pub fn predicted_rates(d1: f64, alpha: f64, n: u32, c: f64) -> (f64, f64) {
    let r = rates_at(item_dprime(d1, alpha, n), n, c);
    (r.hit, r.false_alarm)
}

/// Sign of d pc/dc, rescaled by φ(c)Φ(c)^(n−2) > 0: positive below the
/// optimal criterion, negative above it.
fn pc_slope_sign(d_n: f64, n: u32, c: f64) -> f64 {
    let nf = f64::from(n);
    let likelihood_ratio = (c * d_n - 0.5 * d_n * d_n).exp();
    nf * normal_cdf(c) - (nf - 1.0) * normal_cdf(c - d_n) - likelihood_ratio * normal_cdf(c)
}

/// Criterion maximizing proportion correct for item sensitivity `d_n`.
///
/// Golden-section search over `[−2, d_n + 8]` narrows the optimum to
/// `CRITERION_TOL`; the stationarity condition (equal present/absent
/// densities of the maximum) is then solved by bisection inside that
/// bracket so the result is smooth in `d_n`.
pub fn optimal_criterion_for(d_n: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("set size must be at least 1".into()));
    }
    if !d_n.is_finite() || d_n < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "item sensitivity must be finite and non-negative, got {d_n}"
        )));
    }
    let lo = CRITERION_BRACKET_LO;
    let hi = d_n + CRITERION_BRACKET_SPAN;
    let neg_pc = |c: f64| -rates_at(d_n, n, c).pc();
    let coarse = golden_section_min(neg_pc, lo, hi, CRITERION_TOL);

    let pad = 10.0 * CRITERION_TOL;
    let c = bisect_root(
        |c| pc_slope_sign(d_n, n, c),
        (coarse.lo - pad).max(lo),
        (coarse.hi + pad).min(hi),
    )
    .unwrap_or(0.5 * (coarse.lo + coarse.hi));

    let interior = rates_at(d_n, n, c).pc();
    for edge in [lo, hi] {
        let edge_pc = rates_at(d_n, n, edge).pc();
        if edge_pc > interior + 1e-12 {
            return Err(Error::BracketFailure {
                d_n,
                set_size: n,
                edge_pc,
                interior_pc: interior,
            });
        }
    }
    Ok(c)
}

pub fn optimal_criterion(d1: f64, alpha: f64, n: u32) -> Result<f64> {
    optimal_criterion_for(item_dprime(d1, alpha, n), n)
}

/// Model prediction for one set size at the optimal criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEval {
    pub set_size: u32,
    pub criterion: f64,
    pub hit_rate: f64,
    pub fa_rate: f64,
    pub pc: f64,
    pub(crate) rates: Rates,
}

pub fn evaluate(d1: f64, alpha: f64, n: u32) -> Result<ModelEval> {
    let c = optimal_criterion(d1, alpha, n)?;
    let rates = rates_at(item_dprime(d1, alpha, n), n, c);
    Ok(ModelEval {
        set_size: n,
        criterion: c,
        hit_rate: rates.hit,
        fa_rate: rates.false_alarm,
        pc: rates.pc(),
        rates,
    })
}

/// Proportion correct at the optimal criterion.
pub fn predicted_pc(d1: f64, alpha: f64, n: u32) -> Result<f64> {
    Ok(evaluate(d1, alpha, n)?.pc)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn item_dprime_examples() {
        for n in [1, 2, 4, 8, 64] {
            assert_eq!(item_dprime(2.5, 0.0, n), 2.5);
        }
        assert_eq!(item_dprime(2.0, 1.0, 4), 1.0);
        assert_eq!(item_dprime(3.0, 1.0, 4), 1.5);
        // mpmath: 3 * 8^-0.3
        assert!((item_dprime(3.0, 0.6, 8) - 1.6076601938044397834).abs() < 1e-12);
    }

    #[test]
    fn rates_chance_case() {
        let (h, fa) = predicted_rates(0.0, 0.5, 2, 0.0);
        assert!((h - 0.75).abs() < 1e-15);
        assert!((fa - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rates_single_item_reduce_to_yes_no() {
        let (h, fa) = predicted_rates(3.0, 0.7, 1, 1.5);
        assert!((h - 0.933192798731141933995506).abs() < 1e-14);
        assert!((fa - (1.0 - 0.933192798731141933995506)).abs() < 1e-14);
    }

    #[test]
    fn rates_reference_value() {
        // mpmath at d=2, n=4, c=2
        let (h, fa) = predicted_rates(2.0, 0.0, 4, 2.0);
        assert!((h - 0.53335473254265470281).abs() < 1e-14);
        assert!((fa - 0.087941947900605369941).abs() < 1e-14);
    }

    #[test]
    fn complements_sum_to_one() {
        for &(d, n, c) in &[(0.5, 1, -1.0), (2.0, 8, 2.5), (4.0, 4, 9.0), (1.0, 64, 3.0)] {
            let r = rates_at(d, n, c);
            assert!((r.hit + r.miss - 1.0).abs() < 1e-14);
            assert!((r.false_alarm + r.correct_rejection - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_item_optimum_is_midpoint() {
        for d1 in [0.25, 1.0, 2.0, 3.0, 5.5] {
            let c = optimal_criterion(d1, 0.9, 1).unwrap();
            assert!((c - d1 / 2.0).abs() < 1e-5, "d1={d1}: c*={c}");
        }
    }

    #[test]
    fn zero_sensitivity_gives_chance() {
        for n in [1, 2, 4, 8] {
            let pc = predicted_pc(0.0, 0.5, n).unwrap();
            assert!((pc - 0.5).abs() < 1e-12, "n={n}: {pc}");
        }
    }

    #[test]
    fn optimum_matches_grid_scan() {
        let (d1, n) = (2.0, 8);
        let lo = CRITERION_BRACKET_LO;
        let hi = d1 + CRITERION_BRACKET_SPAN;
        let best = (0..=2000)
            .map(|i| lo + (hi - lo) * i as f64 / 2000.0)
            .max_by(|&a, &b| {
                let pa = rates_at(d1, n, a).pc();
                let pb = rates_at(d1, n, b).pc();
                pa.total_cmp(&pb)
            })
            .unwrap();
        let c = optimal_criterion(d1, 0.0, n).unwrap();
        assert!((c - best).abs() < 2e-3, "c*={c} grid={best}");
    }

    #[test]
    fn predicted_pc_single_item_is_phi_of_half_d() {
        let pc = predicted_pc(2.0, 0.3, 1).unwrap();
        assert!((pc - 0.8413447460685429485852325).abs() < 1e-12);
    }

    #[test]
    fn predicted_pc_decreases_with_set_size_at_fixed_capacity() {
        let pcs: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|&n| predicted_pc(2.0, 1.0, n).unwrap())
            .collect();
        assert!(pcs.windows(2).all(|w| w[1] < w[0]), "{pcs:?}");
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(optimal_criterion_for(1.0, 0).is_err());
        assert!(optimal_criterion_for(-1.0, 2).is_err());
        assert!(optimal_criterion_for(f64::NAN, 2).is_err());
    }
}
