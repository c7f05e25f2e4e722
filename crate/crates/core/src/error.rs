use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid set size {0}: displays use 1, 2, 4 or 8 items")]
    InvalidSetSize(u32),

    #[error("invalid difficulty level {0}: expected 1, 2 or 3")]
    InvalidDifficulty(u8),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("could not place item {item} after {attempts} consecutive rejections")]
    PlacementFailure { item: usize, attempts: u32 },

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error(
        "criterion search bracket failure for d={d_n}, n={set_size}: \
         bracket end reaches pc={edge_pc} above interior maximum {interior_pc}"
    )]
    BracketFailure {
        d_n: f64,
        set_size: u32,
        edge_pc: f64,
        interior_pc: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parameter shape mismatch: {0}")]
    ParameterShape(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("trial validation failed: {0}")]
    Validation(TrialIssues),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: png encoding failed: {message}", path.display())]
    Png { path: PathBuf, message: String },
}

impl Error {
    /// True for errors caused by bad input rather than by the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Png { .. } | Error::BracketFailure { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

/// Offending trial ids found while joining responses to a manifest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialIssues {
    /// Test trials with no response.
    pub missing: Vec<String>,
    /// Trial ids answered more than once.
    pub duplicate: Vec<String>,
    /// Response ids absent from the manifest.
    pub unknown: Vec<String>,
    /// Response ids that belong to the training split.
    pub not_test: Vec<String>,
}

impl TrialIssues {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
            && self.duplicate.is_empty()
            && self.unknown.is_empty()
            && self.not_test.is_empty()
    }
}

impl fmt::Display for TrialIssues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 20;
        let mut first = true;
        for (label, ids) in [
            ("missing", &self.missing),
            ("duplicate", &self.duplicate),
            ("unknown", &self.unknown),
            ("not in test split", &self.not_test),
        ] {
            if ids.is_empty() {
                continue;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "{} {label}: ", ids.len())?;
            let head: Vec<&str> = ids.iter().take(SHOWN).map(String::as_str).collect();
            write!(f, "{}", head.join(", "))?;
            if ids.len() > SHOWN {
                write!(f, ", ...")?;
            }
        }
        Ok(())
    }
}
