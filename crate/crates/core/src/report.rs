//! Figure and table emission: proportion correct against set size (linear
//! axes) and d′ against set size (log-log axes), data with model overlays.
//!
//! The SVG is assembled as text with fixed number formatting, so identical
//! inputs always produce identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::capacity::{predicted_pc, ModelParams};
use crate::error::{Error, Result};
use crate::formats::{DPrimeRow, FitReport};
use crate::normal::normal_quantile;
use crate::psychometrics::CellStats;
use crate::stimgen::{Difficulty, TaskKind};

const Z95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion at 95 % confidence.
pub fn wilson_interval(p: f64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub set_size: u32,
    pub pc: f64,
    pub pc_lo: f64,
    pub pc_hi: f64,
    pub pc_model: f64,
    pub dprime: f64,
    pub dprime_model: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub svg: String,
    pub csv: String,
}

pub const REPORT_HEADER: &str =
    "task,difficulty,set_size,pc,pc_lo,pc_hi,pc_model,dprime,dprime_model";

fn model_dprime(pc: f64) -> Result<f64> {
    if pc <= 0.5 {
        return Ok(0.0);
    }
    Ok(2.0 * normal_quantile(pc.min(1.0 - 1e-15))?)
}

/// Joins cells, d′ rows and a fit into report rows, checking that the three
/// agree on their keys.
pub fn report_rows(cells: &[CellStats], dprime: &[DPrimeRow], fit: &FitReport) -> Result<Vec<ReportRow>> {
    let params: ModelParams = fit.params()?;
    let tasks: BTreeSet<TaskKind> = cells.iter().map(|c| c.task).collect();
    if tasks.len() > 1 {
        return Err(Error::ParameterShape(format!(
            "cells span {} tasks; a fit covers one",
            tasks.len()
        )));
    }
    let mut by_key: BTreeMap<(TaskKind, Difficulty, u32), f64> = BTreeMap::new();
    for r in dprime {
        by_key.insert((r.task, r.difficulty, r.point.set_size), r.point.dprime);
    }
    let cell_keys: BTreeSet<_> = cells.iter().map(|c| (c.task, c.difficulty, c.set_size)).collect();
    let dprime_keys: BTreeSet<_> = by_key.keys().copied().collect();
    if cell_keys != dprime_keys {
        return Err(Error::ParameterShape(
            "cells and d' tables cover different (task, difficulty, set size) cells".into(),
        ));
    }

    let mut rows = Vec::with_capacity(cells.len());
    for c in cells {
        let d1 = *params.d1_by_difficulty.get(&c.difficulty).ok_or_else(|| {
            Error::ParameterShape(format!("fit has no d1 for difficulty level {}", c.difficulty))
        })?;
        let pc_model = predicted_pc(d1, params.alpha, c.set_size)?;
        let (pc_lo, pc_hi) = wilson_interval(c.pc, c.n_trials());
        rows.push(ReportRow {
            task: c.task,
            difficulty: c.difficulty,
            set_size: c.set_size,
            pc: c.pc,
            pc_lo,
            pc_hi,
            pc_model,
            dprime: by_key[&(c.task, c.difficulty, c.set_size)],
            dprime_model: model_dprime(pc_model)?,
        });
    }
    rows.sort_by_key(|r| (r.task, r.difficulty, r.set_size));
    Ok(rows)
}

pub fn build_report(cells: &[CellStats], dprime: &[DPrimeRow], fit: &FitReport) -> Result<Report> {
    let rows = report_rows(cells, dprime, fit)?;
    let csv = report_csv(&rows);
    let svg = render_svg(&rows, fit.alpha);
    Ok(Report { rows, svg, csv })
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.task, r.difficulty, r.set_size, r.pc, r.pc_lo, r.pc_hi, r.pc_model, r.dprime, r.dprime_model
        )
        .expect("write to String");
    }
    out
}

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 400.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;
const LEVEL_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const SET_SIZE_TICKS: [u32; 4] = [1, 2, 4, 8];

/// Maps data to pixel coordinates inside one panel.
struct Frame {
    left: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (PANEL_W - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN_T + (self.y1 - y) / (self.y1 - self.y0) * (PANEL_H - MARGIN_T - MARGIN_B)
    }

    fn plot_box(&self, out: &mut String) {
        let (l, t) = (self.left + MARGIN_L, MARGIN_T);
        let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
        writeln!(
            out,
            r##"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#333"/>"##
        )
        .unwrap();
    }

    fn x_tick(&self, out: &mut String, at: f64, label: &str) {
        let x = self.px(at);
        let bottom = PANEL_H - MARGIN_B;
        writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
            bottom + 5.0,
            bottom + 20.0
        )
        .unwrap();
    }

    fn y_tick(&self, out: &mut String, at: f64, label: &str) {
        let y = self.py(at);
        let left = self.left + MARGIN_L;
        writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            left - 5.0,
            left - 8.0,
            y + 4.0
        )
        .unwrap();
    }

    fn labels(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let cx = self.left + PANEL_W / 2.0;
        let mid_y = (MARGIN_T + PANEL_H - MARGIN_B) / 2.0;
        let lx = self.left + 16.0;
        writeln!(
            out,
            r#"<text x="{cx:.2}" y="24.00" text-anchor="middle" font-weight="bold">{title}</text>"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
            PANEL_H - 12.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{lx:.2}" y="{mid_y:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {mid_y:.2})">{y_label}</text>"#
        )
        .unwrap();
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn marker(out: &mut String, x: f64, y: f64, color: &str) {
    writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#).unwrap();
}

fn level_color(d: Difficulty) -> &'static str {
    LEVEL_COLORS[usize::from(d.level() - 1) % LEVEL_COLORS.len()]
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn by_level(rows: &[ReportRow]) -> BTreeMap<Difficulty, Vec<ReportRow>> {
    let mut groups: BTreeMap<Difficulty, Vec<ReportRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.difficulty).or_default().push(*r);
    }
    groups
}

fn pc_panel(out: &mut String, rows: &[ReportRow]) {
    let lowest = rows
        .iter()
        .flat_map(|r| [r.pc_lo, r.pc_model])
        .fold(0.5, f64::min);
    let frame = Frame {
        left: 0.0,
        x0: 0.0,
        x1: 9.0,
        y0: (lowest * 10.0).floor() / 10.0,
        y1: 1.0,
    };
    frame.plot_box(out);
    for n in SET_SIZE_TICKS {
        frame.x_tick(out, f64::from(n), &n.to_string());
    }
    let mut tick = frame.y0;
    while tick <= 1.0 + 1e-9 {
        frame.y_tick(out, tick, &format!("{tick:.1}"));
        tick += 0.1;
    }
    for (level, group) in by_level(rows) {
        let color = level_color(level);
        let data: Vec<_> = group
            .iter()
            .map(|r| (frame.px(f64::from(r.set_size)), frame.py(r.pc)))
            .collect();
        let model: Vec<_> = group
            .iter()
            .map(|r| (frame.px(f64::from(r.set_size)), frame.py(r.pc_model)))
            .collect();
        polyline(out, &data, color, false);
        polyline(out, &model, color, true);
        for r in &group {
            let x = frame.px(f64::from(r.set_size));
            writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                frame.py(r.pc_lo),
                frame.py(r.pc_hi)
            )
            .unwrap();
            marker(out, x, frame.py(r.pc), color);
        }
    }
    frame.labels(out, "Proportion correct", "set size", "proportion correct");
}

fn dprime_panel(out: &mut String, rows: &[ReportRow]) {
    let positive: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.dprime, r.dprime_model])
        .filter(|v| *v > 0.0)
        .collect();
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo_exp, hi_exp) = if positive.is_empty() {
        (-1, 2)
    } else {
        let a = lo.log2().floor() as i32;
        let b = hi.log2().ceil() as i32;
        (a, b.max(a + 1))
    };
    let frame = Frame {
        left: PANEL_W,
        x0: 0.8f64.log2(),
        x1: 10f64.log2(),
        y0: f64::from(lo_exp),
        y1: f64::from(hi_exp),
    };
    frame.plot_box(out);
    for n in SET_SIZE_TICKS {
        frame.x_tick(out, f64::from(n).log2(), &n.to_string());
    }
    for e in lo_exp..=hi_exp {
        frame.y_tick(out, f64::from(e), &fmt_tick(2f64.powi(e)));
    }
    for (level, group) in by_level(rows) {
        let color = level_color(level);
        let data: Vec<_> = group
            .iter()
            .filter(|r| r.dprime > 0.0)
            .map(|r| (frame.px(f64::from(r.set_size).log2()), frame.py(r.dprime.log2())))
            .collect();
        let model: Vec<_> = group
            .iter()
            .filter(|r| r.dprime_model > 0.0)
            .map(|r| (frame.px(f64::from(r.set_size).log2()), frame.py(r.dprime_model.log2())))
            .collect();
        polyline(out, &data, color, false);
        polyline(out, &model, color, true);
        for &(x, y) in &data {
            marker(out, x, y, color);
        }
    }
    frame.labels(out, "d′ (log-log)", "set size", "d′");
}

fn legend(out: &mut String, rows: &[ReportRow], alpha: f64) {
    let levels: BTreeSet<Difficulty> = rows.iter().map(|r| r.difficulty).collect();
    let mut x = MARGIN_L;
    let y = PANEL_H + 16.0;
    for level in levels {
        let color = level_color(level);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">level {level}</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0
        )
        .unwrap();
        x += 100.0;
    }
    writeln!(
        out,
        r#"<text x="{x:.2}" y="{:.2}">solid: data (95% interval); dashed: model, alpha = {alpha:.3}</text>"#,
        y + 4.0
    )
    .unwrap();
}

pub fn render_svg(rows: &[ReportRow], alpha: f64) -> String {
    let width = 2.0 * PANEL_W;
    let height = PANEL_H + 32.0;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    pc_panel(&mut out, rows);
    dprime_panel(&mut out, rows);
    legend(&mut out, rows, alpha);
    out.push_str("</svg>\n");
    out
}
