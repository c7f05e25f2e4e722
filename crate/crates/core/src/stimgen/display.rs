use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::task::{check_set_size, Difficulty, Rgb, StimulusTable, TaskKind};
use crate::error::{Error, Result};
use crate::rng;

pub const IMAGE_SIZE: u32 = 227;
/// Width of the border band that item footprints must stay out of.
pub const EDGE_MARGIN: i32 = 30;
pub const MIN_SPACING: f64 = 48.0;
/// Consecutive rejected position draws allowed for one item.
pub const MAX_REJECTIONS: u32 = 10_000;
/// Fresh layouts tried after an item runs out of draws. Sequential
/// placement can paint itself into a corner at eight items.
pub const MAX_LAYOUT_RESTARTS: u32 = 100;

/// Highest pixel coordinate an item footprint may touch.
pub const SAFE_MAX: i32 = IMAGE_SIZE as i32 - 1 - EDGE_MARGIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TeeRotation {
    #[serde(rename = "0")]
    Deg0,
    #[serde(rename = "90")]
    Deg90,
    #[serde(rename = "180")]
    Deg180,
    #[serde(rename = "270")]
    Deg270,
}

impl TeeRotation {
    pub fn degrees(self) -> u16 {
        match self {
            TeeRotation::Deg0 => 0,
            TeeRotation::Deg90 => 90,
            TeeRotation::Deg180 => 180,
            TeeRotation::Deg270 => 270,
        }
    }

    /// Maps an image-space offset into the upright T's frame.
    fn unrotate(self, dx: f64, dy: f64) -> (f64, f64) {
        match self {
            TeeRotation::Deg0 => (dx, dy),
            TeeRotation::Deg90 => (dy, -dx),
            TeeRotation::Deg180 => (-dx, -dy),
            TeeRotation::Deg270 => (-dy, dx),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Axis-aligned filled square.
    Square { edge: f64 },
    /// Filled rectangle, vertical at zero tilt, tilted clockwise in degrees.
    Bar { length: f64, width: f64, tilt_deg: f64 },
    /// Crossbar over a centred stem, both `bar_length` × `bar_width`,
    /// inscribed in a `bar_length` square box.
    Tee {
        bar_length: f64,
        bar_width: f64,
        rotation: TeeRotation,
    },
}

impl Shape {
    /// Half-extent of the footprint in whole pixels, (x, y).
    pub fn half_extent(&self) -> (i32, i32) {
        let (hx, hy) = match *self {
            Shape::Square { edge } => (edge / 2.0, edge / 2.0),
            Shape::Bar {
                length,
                width,
                tilt_deg,
            } => {
                let (s, c) = tilt_deg.to_radians().sin_cos();
                let (s, c) = (s.abs(), c.abs());
                (
                    width / 2.0 * c + length / 2.0 * s,
                    width / 2.0 * s + length / 2.0 * c,
                )
            }
            Shape::Tee { bar_length, .. } => (bar_length / 2.0, bar_length / 2.0),
        };
        (hx.ceil() as i32, hy.ceil() as i32)
    }

    /// Whether a pixel whose centre sits `(dx, dy)` from the item's centre
    /// pixel is covered. Intervals are half-open so footprints have exact
    /// integer sizes.
    pub fn covers(&self, dx: f64, dy: f64) -> bool {
        let within = |v: f64, half: f64| -half <= v && v < half;
        match *self {
            Shape::Square { edge } => within(dx, edge / 2.0) && within(dy, edge / 2.0),
            Shape::Bar {
                length,
                width,
                tilt_deg,
            } => {
                let (across, along) = if tilt_deg == 0.0 {
                    (dx, dy)
                } else {
                    let (s, c) = tilt_deg.to_radians().sin_cos();
                    (dx * c + dy * s, -dx * s + dy * c)
                };
                within(across, width / 2.0) && within(along, length / 2.0)
            }
            Shape::Tee {
                bar_length,
                bar_width,
                rotation,
            } => {
                let (u, v) = rotation.unrotate(dx, dy);
                let half = bar_length / 2.0;
                let crossbar = within(u, half) && -half <= v && v < -half + bar_width;
                let stem = within(u, bar_width / 2.0) && within(v, half);
                crossbar || stem
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ItemSpec {
    pub shape: Shape,
    /// Centre pixel (x, y).
    pub center: (i32, i32),
    pub color: Rgb,
    pub is_target: bool,
}

impl ItemSpec {
    /// Inclusive footprint bounding box (x0, y0, x1, y1).
    pub fn bounds(&self) -> (i32, i32, i32, i32) {
        let (hx, hy) = self.shape.half_extent();
        let (x, y) = self.center;
        (x - hx, y - hy, x + hx, y + hy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplaySpec {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub set_size: u32,
    pub target_present: bool,
    pub items: Vec<ItemSpec>,
    pub seed: u64,
}

impl DisplaySpec {
    pub fn target_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_target).count()
    }

    /// Every broken display invariant, described. Empty for a valid spec.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.items.len() != self.set_size as usize {
            out.push(format!(
                "{} items for set size {}",
                self.items.len(),
                self.set_size
            ));
        }
        let want_targets = usize::from(self.target_present);
        if self.target_count() != want_targets {
            out.push(format!(
                "{} targets, expected {want_targets}",
                self.target_count()
            ));
        }
        for (i, item) in self.items.iter().enumerate() {
            let (x0, y0, x1, y1) = item.bounds();
            if x0 < EDGE_MARGIN || y0 < EDGE_MARGIN || x1 > SAFE_MAX || y1 > SAFE_MAX {
                out.push(format!("item {i} footprint {:?} enters the margin", item.bounds()));
            }
            for (j, other) in self.items.iter().enumerate().skip(i + 1) {
                let d = distance(item.center, other.center);
                if d < MIN_SPACING {
                    out.push(format!("items {i} and {j} are {d:.2} px apart"));
                }
            }
        }
        out
    }
}

pub(crate) fn distance(a: (i32, i32), b: (i32, i32)) -> f64 {
    let dx = f64::from(a.0 - b.0);
    let dy = f64::from(a.1 - b.1);
    (dx * dx + dy * dy).sqrt()
}

/// Lays out one display with the standard stimulus table.
pub fn plan_display(
    task: TaskKind,
    difficulty: Difficulty,
    set_size: u32,
    target_present: bool,
    seed: u64,
) -> Result<DisplaySpec> {
    plan_display_with(
        &StimulusTable::standard(),
        task,
        difficulty,
        set_size,
        target_present,
        seed,
    )
}

pub fn plan_display_with(
    table: &StimulusTable,
    task: TaskKind,
    difficulty: Difficulty,
    set_size: u32,
    target_present: bool,
    seed: u64,
) -> Result<DisplaySpec> {
    check_set_size(set_size)?;
    let mut rng = rng::stream(seed);

    let mut looks: Vec<(Shape, Rgb, bool)> = Vec::with_capacity(set_size as usize);
    if target_present {
        let (shape, color) = target_look(table, task, difficulty);
        looks.push((shape, color, true));
    }
    while looks.len() < set_size as usize {
        let (shape, color) = distractor_look(table, task, difficulty, &mut rng);
        looks.push((shape, color, false));
    }

    let mut stuck = 0;
    let mut items = Vec::new();
    for _ in 0..=MAX_LAYOUT_RESTARTS {
        match layout(&looks, &mut rng) {
            Ok(placed) => {
                items = placed;
                break;
            }
            Err(item) => stuck = item,
        }
    }
    if items.is_empty() {
        return Err(Error::PlacementFailure {
            item: stuck,
            attempts: MAX_REJECTIONS,
        });
    }

    Ok(DisplaySpec {
        task,
        difficulty,
        set_size,
        target_present,
        items,
        seed,
    })
}

/// Places every item in order; on failure returns the index of the item
/// that could not be placed.
fn layout<R: Rng>(looks: &[(Shape, Rgb, bool)], rng: &mut R) -> std::result::Result<Vec<ItemSpec>, usize> {
    let mut items: Vec<ItemSpec> = Vec::with_capacity(looks.len());
    for (index, &(shape, color, is_target)) in looks.iter().enumerate() {
        let center = place(&shape, &items, rng).ok_or(index)?;
        items.push(ItemSpec {
            shape,
            center,
            color,
            is_target,
        });
    }
    Ok(items)
}

/// Rejection sampling of a centre that keeps the footprint out of the
/// margin and respects the spacing to every placed item.
fn place<R: Rng>(shape: &Shape, placed: &[ItemSpec], rng: &mut R) -> Option<(i32, i32)> {
    let (hx, hy) = shape.half_extent();
    let (x_lo, x_hi) = (EDGE_MARGIN + hx, SAFE_MAX - hx);
    let (y_lo, y_hi) = (EDGE_MARGIN + hy, SAFE_MAX - hy);
    if x_lo > x_hi || y_lo > y_hi {
        return None;
    }
    for _ in 0..MAX_REJECTIONS {
        let candidate = (rng.gen_range(x_lo..=x_hi), rng.gen_range(y_lo..=y_hi));
        if placed
            .iter()
            .all(|item| distance(item.center, candidate) >= MIN_SPACING)
        {
            return Some(candidate);
        }
    }
    None
}

fn gray(v: u8) -> Rgb {
    [v, v, v]
}

fn target_look(table: &StimulusTable, task: TaskKind, d: Difficulty) -> (Shape, Rgb) {
    match task {
        TaskKind::Luminance => (
            Shape::Square {
                edge: table.square_edge,
            },
            gray(table.luminance_target(d)),
        ),
        TaskKind::Color => (
            Shape::Square {
                edge: table.square_edge,
            },
            table.color_target(d),
        ),
        TaskKind::Length => (
            Shape::Bar {
                length: table.length_target(d),
                width: table.bar_width,
                tilt_deg: 0.0,
            },
            table.bar_color,
        ),
        TaskKind::Orientation => (
            Shape::Bar {
                length: table.bar_length,
                width: table.bar_width,
                tilt_deg: table.orientation_target_tilt(d),
            },
            table.bar_color,
        ),
        TaskKind::RotatedT => (tee(table, d, TeeRotation::Deg0), table.bar_color),
    }
}

fn distractor_look<R: Rng>(
    table: &StimulusTable,
    task: TaskKind,
    d: Difficulty,
    rng: &mut R,
) -> (Shape, Rgb) {
    match task {
        TaskKind::Luminance => (
            Shape::Square {
                edge: table.square_edge,
            },
            gray(table.luminance_distractor),
        ),
        TaskKind::Color => (
            Shape::Square {
                edge: table.square_edge,
            },
            table.color_distractor,
        ),
        TaskKind::Length | TaskKind::Orientation => (
            Shape::Bar {
                length: table.bar_length,
                width: table.bar_width,
                tilt_deg: 0.0,
            },
            table.bar_color,
        ),
        TaskKind::RotatedT => {
            let rotation = *[TeeRotation::Deg90, TeeRotation::Deg180, TeeRotation::Deg270]
                .choose(rng)
                .expect("non-empty");
            (tee(table, d, rotation), table.bar_color)
        }
    }
}

fn tee(table: &StimulusTable, d: Difficulty, rotation: TeeRotation) -> Shape {
    let scale = table.tee_scale(d);
    Shape::Tee {
        bar_length: table.tee_bar_length * scale,
        bar_width: table.tee_bar_width * scale,
        rotation,
    }
}
