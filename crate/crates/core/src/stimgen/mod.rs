//! Visual-search display planning, rasterization and dataset emission.

mod dataset;
mod display;
mod render;
mod task;

pub use dataset::{
    generate_dataset, plan_dataset, trial_id, trial_seed, DATASET_SIZE, IMAGES_PER_CELL,
    TEST_PER_CELL,
};
pub use display::{
    plan_display, plan_display_with, DisplaySpec, ItemSpec, Shape, TeeRotation, EDGE_MARGIN,
    IMAGE_SIZE, MAX_LAYOUT_RESTARTS, MAX_REJECTIONS, MIN_SPACING, SAFE_MAX,
};
pub use render::{render_display, render_display_on, Image};
pub use task::{check_set_size, Difficulty, Rgb, StimulusTable, TaskKind, SET_SIZES};
