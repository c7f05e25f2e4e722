//! Fixtures shared by the benchmarks.

use vsl_core::capacity::evaluate;
use vsl_core::psychometrics::CellStats;
use vsl_core::stimgen::{Difficulty, TaskKind, SET_SIZES};

/// Cells holding the expected counts of a model observer, 800 trials each.
pub fn expected_cells(d1: f64, alpha: f64) -> Vec<CellStats> {
    let level = Difficulty::new(1).expect("valid level");
    SET_SIZES
        .iter()
        .map(|&n| {
            let m = evaluate(d1, alpha, n).expect("valid model");
            let hits = (m.hit_rate * 400.0).round() as u64;
            let fas = (m.fa_rate * 400.0).round() as u64;
            CellStats::new(TaskKind::Color, level, n, 400, 400, hits, fas).expect("valid counts")
        })
        .collect()
}
