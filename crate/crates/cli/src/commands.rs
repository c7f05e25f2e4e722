use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use vsl_core::capacity::{fit_capacity, FitOptions};
use vsl_core::formats::{
    cells_csv, dprime_csv, dprime_rows, read_cells, read_dprime, slopes_csv, DatasetManifest,
    FitReport, ResponseFile, SlopeRow, Split,
};
use vsl_core::observer::{simulate_observer_by_level, CriterionPolicy, ObserverParams};
use vsl_core::psychometrics::{aggregate_cells, group_by_condition, loglog_slope};
use vsl_core::report::build_report;
use vsl_core::stimgen::{generate_dataset, Difficulty, SET_SIZES};

use crate::args::{AnalyzeArgs, FitArgs, GenArgs, ReportArgs, SimulateArgs};
use crate::config::{D1Config, ExperimentConfig};
use crate::Usage;

fn require_input(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Usage(format!("input file {} does not exist", path.display())).into())
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating directory {}", path.display()))
}

pub fn gen(args: GenArgs, cfg: &ExperimentConfig) -> Result<()> {
    let task = args
        .task
        .or(cfg.task)
        .ok_or_else(|| Usage("--task is required".into()))?;
    let seed = args
        .seed
        .or(cfg.seed)
        .ok_or_else(|| Usage("--seed is required".into()))?;
    let out = args
        .out
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| Usage("--out is required".into()))?;
    let mut levels: Vec<Difficulty> = if args.difficulty.is_empty() {
        if cfg.difficulties.is_empty() {
            Difficulty::LEVELS.to_vec()
        } else {
            cfg.difficulties.clone()
        }
    } else {
        args.difficulty
            .iter()
            .map(|&l| Difficulty::new(l))
            .collect::<vsl_core::Result<_>>()?
    };
    levels.sort();
    levels.dedup();

    let mut manifest = DatasetManifest::default();
    for level in levels {
        manifest.extend(generate_dataset(task, level, seed, &out)?);
    }
    manifest.write(&out.join("manifest.jsonl"))?;

    println!("task        level  set_size  train_present  train_absent  test_present  test_absent");
    let mut counts: BTreeMap<(Difficulty, u32), [usize; 4]> = BTreeMap::new();
    for row in &manifest.rows {
        let slot = match (row.split, row.target_present) {
            (Split::Train, true) => 0,
            (Split::Train, false) => 1,
            (Split::Test, true) => 2,
            (Split::Test, false) => 3,
        };
        counts.entry((row.difficulty, row.set_size)).or_default()[slot] += 1;
    }
    for ((level, n), c) in counts {
        println!(
            "{:<11} {:>5}  {:>8}  {:>13}  {:>12}  {:>12}  {:>11}",
            task.as_str(),
            level,
            n,
            c[0],
            c[1],
            c[2],
            c[3]
        );
    }
    println!("wrote {} images and {}", manifest.len(), out.join("manifest.jsonl").display());
    Ok(())
}

/// Parses `3` or `1=3,2=2.5` into per-level values for `levels`.
fn parse_d1(spec: &str, levels: &[Difficulty]) -> Result<BTreeMap<Difficulty, f64>> {
    let bad = || Usage(format!("--d1 '{spec}': expected a number or level=value pairs like 1=3,2=2"));
    if let Ok(v) = spec.trim().parse::<f64>() {
        return Ok(levels.iter().map(|&l| (l, v)).collect());
    }
    let mut out = BTreeMap::new();
    for part in spec.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        let level: u8 = k.trim().parse().map_err(|_| bad())?;
        let value: f64 = v.trim().parse().map_err(|_| bad())?;
        out.insert(Difficulty::new(level)?, value);
    }
    Ok(out)
}

fn d1_from_config(d1: &D1Config, levels: &[Difficulty]) -> Result<BTreeMap<Difficulty, f64>> {
    match d1 {
        D1Config::All(v) => Ok(levels.iter().map(|&l| (l, *v)).collect()),
        D1Config::PerLevel(map) => map
            .iter()
            .map(|(k, v)| {
                let level: u8 = k
                    .parse()
                    .map_err(|_| Usage(format!("config d1 key '{k}' is not a level")))?;
                Ok((Difficulty::new(level)?, *v))
            })
            .collect(),
    }
}

pub fn simulate(args: SimulateArgs, cfg: &ExperimentConfig) -> Result<()> {
    require_input(&args.manifest)?;
    let manifest = DatasetManifest::read(&args.manifest)?;
    let mut levels: Vec<Difficulty> = manifest.test_rows().map(|r| r.difficulty).collect();
    levels.sort();
    levels.dedup();

    let obs = cfg.observer.as_ref();
    let d1 = match (&args.d1, obs.and_then(|o| o.d1.as_ref())) {
        (Some(spec), _) => parse_d1(spec, &levels)?,
        (None, Some(d1)) => d1_from_config(d1, &levels)?,
        (None, None) => return Err(Usage("--d1 is required".into()).into()),
    };
    let alpha = args
        .alpha
        .or(obs.and_then(|o| o.alpha))
        .ok_or_else(|| Usage("--alpha is required".into()))?;
    let seed = args
        .seed
        .or(obs.and_then(|o| o.seed))
        .or(cfg.seed)
        .ok_or_else(|| Usage("--seed is required".into()))?;
    let criterion = match args.criterion.or(obs.and_then(|o| o.criterion)) {
        Some(c) => CriterionPolicy::Fixed(c),
        None => CriterionPolicy::Optimal,
    };

    let observers = d1
        .into_iter()
        .map(|(level, d1)| Ok((level, ObserverParams::new(d1, alpha, criterion, seed)?)))
        .collect::<vsl_core::Result<BTreeMap<_, _>>>()?;
    let responses = simulate_observer_by_level(&observers, &manifest, args.with_score)?;
    responses.write(&args.out)?;
    println!("wrote {} responses to {}", responses.len(), args.out.display());
    Ok(())
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    require_input(&args.manifest)?;
    require_input(&args.responses)?;
    let manifest = DatasetManifest::read(&args.manifest)?;
    let responses = ResponseFile::read(&args.responses)?;
    let cells = aggregate_cells(&manifest, &responses)?;

    let mut slopes = Vec::new();
    for ((task, difficulty), group) in group_by_condition(&cells) {
        let points = group.iter().map(|c| c.dprime()).collect::<vsl_core::Result<Vec<_>>>()?;
        match loglog_slope(&points) {
            Ok(estimate) => slopes.push(SlopeRow {
                task,
                difficulty,
                estimate,
            }),
            Err(e) => eprintln!("warning: no slope for {task} level {difficulty}: {e}"),
        }
    }

    create_dir(&args.out_dir)?;
    write_text(&args.out_dir.join("cells.csv"), &cells_csv(&cells)?)?;
    write_text(&args.out_dir.join("dprime.csv"), &dprime_csv(&dprime_rows(&cells)?))?;
    write_text(&args.out_dir.join("slopes.csv"), &slopes_csv(&slopes))?;
    println!("task,difficulty,slope,points_used");
    for s in &slopes {
        println!(
            "{},{},{:.4},{}",
            s.task, s.difficulty, s.estimate.slope, s.estimate.points_used
        );
    }
    Ok(())
}

pub fn fit(args: FitArgs, cfg: &ExperimentConfig) -> Result<()> {
    require_input(&args.cells)?;
    let mut cells = read_cells(&args.cells)?;
    if let Some(task) = args.task.or(cfg.task) {
        cells.retain(|c| c.task == task);
        if cells.is_empty() {
            return Err(Usage(format!("{} has no cells for task {task}", args.cells.display())).into());
        }
    }
    let options = cfg.fit.as_ref().map_or_else(FitOptions::default, |f| f.options());
    let fit = fit_capacity(&cells, &options)?;
    let report = FitReport::from(&fit);
    write_text(&args.out, &report.to_json())?;

    println!("alpha = {:.4}", report.alpha);
    for (level, d1) in &report.d1 {
        println!("d1[{level}] = {d1:.4}");
    }
    println!("nll = {:.4}, converged = {}", report.nll, report.converged);
    if !fit.converged {
        eprintln!(
            "warning: Nelder-Mead stopped at the evaluation budget ({})",
            options.nelder_mead.max_evaluations
        );
    }
    Ok(())
}

pub fn report(args: ReportArgs) -> Result<()> {
    for p in [&args.cells, &args.dprime, &args.fit] {
        require_input(p)?;
    }
    let cells = read_cells(&args.cells)?;
    let dprime = read_dprime(&args.dprime)?;
    let fit = FitReport::read(&args.fit)?;
    let report = build_report(&cells, &dprime, &fit)?;
    create_dir(&args.out_dir)?;
    let svg: PathBuf = args.out_dir.join("report.svg");
    write_text(&svg, &report.svg)?;
    write_text(&args.out_dir.join("report.csv"), &report.csv)?;
    println!(
        "wrote {} and report.csv ({} rows, set sizes {:?})",
        svg.display(),
        report.rows.len(),
        SET_SIZES
    );
    Ok(())
}
