use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::display::plan_display_with;
use super::render::render_display_on;
use super::task::{Difficulty, StimulusTable, TaskKind, SET_SIZES};
use crate::error::{Error, Result};
use crate::formats::{DatasetManifest, ManifestRow, Split};
use crate::rng;

/// Images per (set size, target present/absent) cell.
pub const IMAGES_PER_CELL: usize = 1200;
/// Of those, how many go to the test split.
pub const TEST_PER_CELL: usize = 400;
pub const DATASET_SIZE: usize = IMAGES_PER_CELL * 2 * SET_SIZES.len();

const SPLIT_STREAM: u64 = 0x0053_504c_4954; // "SPLIT"

pub fn trial_id(task: TaskKind, difficulty: Difficulty, index: usize) -> String {
    format!("{task}_d{difficulty}_{index:04}")
}

/// Seed of the display at `index`, independent of every other trial.
pub fn trial_seed(dataset_seed: u64, task: TaskKind, difficulty: Difficulty, index: usize) -> u64 {
    rng::derive_seed(
        dataset_seed,
        &[task.code(), u64::from(difficulty.level()), index as u64],
    )
}

/// Lays out the manifest rows without rendering anything.
///
/// Rows are ordered by set size, then present before absent, then
/// replicate. Within every cell a seeded shuffle picks the test trials.
pub fn plan_dataset(task: TaskKind, difficulty: Difficulty, seed: u64) -> DatasetManifest {
    let mut rows = Vec::with_capacity(DATASET_SIZE);
    for (size_idx, &set_size) in SET_SIZES.iter().enumerate() {
        for (present_idx, target_present) in [true, false].into_iter().enumerate() {
            let cell = (size_idx * 2 + present_idx) as u64;
            let mut order: Vec<usize> = (0..IMAGES_PER_CELL).collect();
            let mut split_rng = rng::stream(rng::derive_seed(
                seed,
                &[task.code(), u64::from(difficulty.level()), SPLIT_STREAM, cell],
            ));
            order.shuffle(&mut split_rng);
            let mut is_test = vec![false; IMAGES_PER_CELL];
            for &k in &order[..TEST_PER_CELL] {
                is_test[k] = true;
            }

            for (k, test) in is_test.into_iter().enumerate() {
                let index = cell as usize * IMAGES_PER_CELL + k;
                let trial_id = trial_id(task, difficulty, index);
                rows.push(ManifestRow {
                    image_path: format!("{trial_id}.png"),
                    trial_id,
                    split: if test { Split::Test } else { Split::Train },
                    task,
                    difficulty,
                    set_size,
                    target_present,
                    seed: trial_seed(seed, task, difficulty, index),
                });
            }
        }
    }
    DatasetManifest::new(rows)
}

/// Plans, renders and writes every image of one (task, difficulty)
/// dataset into `out_dir`, returning its manifest. The manifest file itself
/// is left to the caller so several datasets can share one.
pub fn generate_dataset(
    task: TaskKind,
    difficulty: Difficulty,
    seed: u64,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    let manifest = plan_dataset(task, difficulty, seed);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let table = StimulusTable::standard();
    manifest.rows.par_iter().try_for_each(|row| {
        let spec = plan_display_with(
            &table,
            row.task,
            row.difficulty,
            row.set_size,
            row.target_present,
            row.seed,
        )?;
        render_display_on(&spec, table.background).save_png(&out_dir.join(&row.image_path))
    })?;
    Ok(manifest)
}
