use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five search tasks. Four differ from distractors in one simple
/// feature; `RotatedT` differs only in the spatial arrangement of two bars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Luminance,
    Color,
    Length,
    Orientation,
    RotatedT,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::Luminance,
        TaskKind::Color,
        TaskKind::Length,
        TaskKind::Orientation,
        TaskKind::RotatedT,
    ];

    pub fn is_complex(self) -> bool {
        matches!(self, TaskKind::RotatedT)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Luminance => "luminance",
            TaskKind::Color => "color",
            TaskKind::Length => "length",
            TaskKind::Orientation => "orientation",
            TaskKind::RotatedT => "rotated_t",
        }
    }

    /// Stable small integer used when deriving seeds.
    pub(crate) fn code(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown task '{s}' (expected luminance, color, length, orientation or rotated_t)"
                ))
            })
    }
}

/// Difficulty level 1..=3; level 1 is the easiest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Difficulty(u8);

impl Difficulty {
    pub const LEVELS: [Difficulty; 3] = [Difficulty(1), Difficulty(2), Difficulty(3)];

    pub fn new(level: u8) -> Result<Self> {
        if (1..=3).contains(&level) {
            Ok(Difficulty(level))
        } else {
            Err(Error::InvalidDifficulty(level))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl TryFrom<u8> for Difficulty {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        Difficulty::new(v)
    }
}

impl From<Difficulty> for u8 {
    fn from(d: Difficulty) -> u8 {
        d.0
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The display set sizes.
pub const SET_SIZES: [u32; 4] = [1, 2, 4, 8];

pub fn check_set_size(n: u32) -> Result<u32> {
    if SET_SIZES.contains(&n) {
        Ok(n)
    } else {
        Err(Error::InvalidSetSize(n))
    }
}

pub type Rgb = [u8; 3];

/// Item geometry and the per-level target/distractor values for every task.
/// Arrays indexed by difficulty hold level 1, 2, 3 in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct StimulusTable {
    pub background: Rgb,
    pub square_edge: f64,
    pub bar_width: f64,
    pub bar_length: f64,
    pub bar_color: Rgb,
    pub tee_bar_width: f64,
    pub tee_bar_length: f64,

    pub luminance_distractor: u8,
    pub luminance_target: [u8; 3],
    pub color_distractor: Rgb,
    pub color_target: [Rgb; 3],
    pub length_target: [f64; 3],
    pub orientation_target_tilt: [f64; 3],
    pub tee_scale: [f64; 3],
}

impl StimulusTable {
    pub fn standard() -> Self {
        Self {
            background: [0, 0, 0],
            square_edge: 20.0,
            bar_width: 5.0,
            bar_length: 31.0,
            bar_color: [255, 255, 255],
            tee_bar_width: 5.0,
            tee_bar_length: 25.0,

            luminance_distractor: 64,
            luminance_target: [192, 128, 96],
            color_distractor: [160, 160, 0],
            color_target: [[160, 0, 0], [160, 64, 0], [160, 112, 0]],
            length_target: [55.0, 45.0, 37.0],
            orientation_target_tilt: [40.0, 20.0, 10.0],
            tee_scale: [1.0, 0.75, 0.6],
        }
    }

    pub fn luminance_target(&self, d: Difficulty) -> u8 {
        self.luminance_target[d.index()]
    }

    pub fn color_target(&self, d: Difficulty) -> Rgb {
        self.color_target[d.index()]
    }

    pub fn length_target(&self, d: Difficulty) -> f64 {
        self.length_target[d.index()]
    }

    pub fn orientation_target_tilt(&self, d: Difficulty) -> f64 {
        self.orientation_target_tilt[d.index()]
    }

    pub fn tee_scale(&self, d: Difficulty) -> f64 {
        self.tee_scale[d.index()]
    }
}

impl Default for StimulusTable {
    fn default() -> Self {
        Self::standard()
    }
}
