use std::path::Path;
use std::process::{Command, Output};

use vsl_core::formats::{read_cells, DatasetManifest};
use vsl_core::stimgen::{plan_dataset, Difficulty, TaskKind};

fn vsl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A manifest without images, enough for simulate and analyze.
fn write_manifest(dir: &Path, levels: &[u8]) {
    let mut m = DatasetManifest::default();
    for &l in levels {
        m.extend(plan_dataset(TaskKind::Length, Difficulty::new(l).unwrap(), 5));
    }
    m.write(&dir.join("m.jsonl")).unwrap();
}

fn pc_by_set_size(dir: &Path, seed: u64, d1: &str, alpha: &str) -> Vec<(u32, f64)> {
    let s = seed.to_string();
    let sim = vsl(dir, &["simulate", "--manifest", "m.jsonl", "--d1", d1, "--alpha", alpha, "--seed", &s, "--out", "r.csv"]);
    assert!(sim.status.success(), "{}", stderr(&sim));
    let an = vsl(dir, &["analyze", "--manifest", "m.jsonl", "--responses", "r.csv", "--out-dir", "a"]);
    assert!(an.status.success(), "{}", stderr(&an));
    read_cells(&dir.join("a/cells.csv"))
        .unwrap()
        .iter()
        .map(|c| (c.set_size, c.pc))
        .collect()
}

#[test]
fn gen_into_unwritable_location_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocker"), b"").unwrap();
    let out = vsl(dir.path(), &["gen", "--task", "color", "--difficulty", "1", "--seed", "1", "--out", "blocker/sub"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("blocker/sub"), "{}", stderr(&out));
}

#[test]
fn gen_requires_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsl(dir.path(), &["gen", "--task", "color", "--out", "d"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
    assert!(!dir.path().join("d").exists());
}

#[test]
fn missing_manifest_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsl(dir.path(), &["simulate", "--manifest", "nope.jsonl", "--d1", "3", "--alpha", "0.6", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nope.jsonl"));
}

#[test]
fn simulate_writes_one_row_per_test_trial() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1]);
    let out = vsl(dir.path(), &["simulate", "--manifest", "m.jsonl", "--d1", "3", "--alpha", "0.6", "--seed", "1", "--with-score"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("responses.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial_id,response,score"));
    assert_eq!(lines.count(), 3200);
}

#[test]
fn zero_sensitivity_is_at_chance() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1]);
    for (n, pc) in pc_by_set_size(dir.path(), 3, "0", "0.6") {
        assert!((pc - 0.5).abs() <= 0.02, "n={n}: pc={pc}");
    }
}

#[test]
fn larger_alpha_lowers_accuracy_at_eight_items() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1]);
    let at8 = |alpha: &str| {
        (0..20)
            .map(|seed| {
                pc_by_set_size(dir.path(), seed, "3", alpha)
                    .into_iter()
                    .find(|(n, _)| *n == 8)
                    .unwrap()
                    .1
            })
            .sum::<f64>()
            / 20.0
    };
    let (flat, steep) = (at8("0"), at8("1"));
    assert!(steep < flat, "alpha=1 {steep} vs alpha=0 {flat}");
}

#[test]
fn analyze_lists_offending_trials() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1]);
    let sim = vsl(dir.path(), &["simulate", "--manifest", "m.jsonl", "--d1", "3", "--alpha", "0.6", "--seed", "1"]);
    assert!(sim.status.success());
    let path = dir.path().join("responses.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let dropped = text.lines().nth(1).unwrap().split(',').next().unwrap().to_string();
    let kept: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 1).map(|(_, l)| l).collect();
    std::fs::write(&path, kept.join("\n") + "\n").unwrap();

    let out = vsl(dir.path(), &["analyze", "--manifest", "m.jsonl", "--responses", "responses.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(&dropped), "{}", stderr(&out));
}

#[test]
fn fit_report_round_trip_and_key_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1, 2]);
    pc_by_set_size(dir.path(), 4, "1=3,2=2", "0.6");
    let fit = vsl(dir.path(), &["fit", "--cells", "a/cells.csv"]);
    assert!(fit.status.success(), "{}", stderr(&fit));
    let stdout = String::from_utf8_lossy(&fit.stdout);
    assert!(stdout.contains("alpha = ") && stdout.contains("d1[2] = "), "{stdout}");

    let report = vsl(dir.path(), &["report", "--cells", "a/cells.csv", "--dprime", "a/dprime.csv", "--fit", "fit.json", "--out-dir", "r"]);
    assert!(report.status.success(), "{}", stderr(&report));
    let svg = std::fs::read_to_string(dir.path().join("r/report.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    let json = std::fs::read_to_string(dir.path().join("fit.json")).unwrap();
    std::fs::write(dir.path().join("bad.json"), json.replace("\"2\":", "\"3\":")).unwrap();
    let bad = vsl(dir.path(), &["report", "--cells", "a/cells.csv", "--dprime", "a/dprime.csv", "--fit", "bad.json", "--out-dir", "r2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("level 2"), "{}", stderr(&bad));
}

#[test]
fn config_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    write_manifest(dir.path(), &[1]);
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"observer": {"d1": 0.0, "alpha": 0.5, "seed": 9}}"#,
    )
    .unwrap();
    let from_cfg = vsl(dir.path(), &["--config", "cfg.json", "simulate", "--manifest", "m.jsonl", "--out", "a.csv"]);
    assert!(from_cfg.status.success(), "{}", stderr(&from_cfg));
    let flags = vsl(dir.path(), &["simulate", "--manifest", "m.jsonl", "--d1", "0", "--alpha", "0.5", "--seed", "9", "--out", "b.csv"]);
    assert!(flags.status.success());
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));

    let overridden = vsl(dir.path(), &["--config", "cfg.json", "simulate", "--manifest", "m.jsonl", "--seed", "10", "--out", "c.csv"]);
    assert!(overridden.status.success());
    assert_ne!(read("a.csv"), read("c.csv"));

    std::fs::write(dir.path().join("typo.json"), r#"{"sead": 1}"#).unwrap();
    let typo = vsl(dir.path(), &["--config", "typo.json", "simulate", "--manifest", "m.jsonl"]);
    assert_eq!(typo.status.code(), Some(2));
}

#[test]
fn malformed_cells_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cells.csv"),
        "task,difficulty,set_size,n_present,n_absent,hits,false_alarms,pc,dprime,clamped\ncolor,1,1,400,400\n",
    )
    .unwrap();
    let out = vsl(dir.path(), &["fit", "--cells", "cells.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cells.csv:2"), "{}", stderr(&out));
}
