//! Enumeration of auxiliary channels, generator points, time-sharing hulls
//! and two-axis Pareto frontiers.

mod enumerate;
mod frontier;
mod hull;

pub use enumerate::{enumerate_channels, ChannelEnumeration, ChannelTag, ChannelTuple};
pub use frontier::{axis_names, frontier_2d, generate, minimize_single_user, GeneratorPoint, GeneratorSet};
pub use hull::{hull_membership, CapacityHull, HULL_TOL};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::ProbError;
use crate::regions::RegionError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Prob(#[from] ProbError),

    #[error(transparent)]
    Region(#[from] RegionError),

    #[error("invalid search config: {0}")]
    InvalidConfig(String),

    #[error("no {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown axis `{axis}`; expected one of {known}")]
    UnknownAxis { axis: String, known: String },

    #[error("linear program failed: {0}")]
    Lp(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    #[default]
    DeterministicOnly,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default)]
    pub mode: SearchMode,
    /// Probability quantum for grid mode; `1 / grid_step` must be an integer.
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Collapse channels that differ only by a relabeling of `U`.
    #[serde(default = "default_true")]
    pub dedupe: bool,
    /// Cap on candidates examined, per user and over tuples.
    #[serde(default = "default_max_tuples")]
    pub max_tuples: usize,
}

fn default_grid_step() -> f64 {
    0.125
}

fn default_true() -> bool {
    true
}

fn default_max_tuples() -> usize {
    100_000
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: SearchMode::default(),
            grid_step: default_grid_step(),
            dedupe: true,
            max_tuples: default_max_tuples(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        self.quanta().map(|_| ())
    }

    /// Number of grid quanta per unit of probability (1 in deterministic mode).
    pub fn quanta(&self) -> Result<u32, SearchError> {
        if self.max_tuples == 0 {
            return Err(SearchError::InvalidConfig("max_tuples must be positive".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(SearchError::InvalidConfig(format!(
                "grid_step {} outside (0, 0.5]",
                self.grid_step
            )));
        }
        let q = 1.0 / self.grid_step;
        if (q - q.round()).abs() > 1e-9 || q.round() > 1024.0 {
            return Err(SearchError::InvalidConfig(format!(
                "grid_step {} is not 1/k for an integer k <= 1024",
                self.grid_step
            )));
        }
        Ok(match self.mode {
            SearchMode::DeterministicOnly => 1,
            SearchMode::Grid => q.round() as u32,
        })
    }
}
