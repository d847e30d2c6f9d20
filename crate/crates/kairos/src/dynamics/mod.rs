//! Shock-response dynamics: daily activity stacked around hackathon start
//! dates, power-law relaxation fits of the post-peak decay, criticality
//! classification, and the contributor-productivity scaling law.

mod relax;
mod scaling;
mod stack;

pub use relax::{
    classify_cascade, fit_relaxation, fit_relaxation_default, BinPoint, CascadeClass,
    CascadeLabel, RelaxationFit,
};
pub use scaling::{
    fit_productivity_scaling, fit_scaling_pairs, productivity_windows, ScalingFit,
    DEFAULT_SCALING_WINDOW_DAYS,
};
pub use stack::{stack_event_activity, stack_repo_creations, StackPair};

use serde::Serialize;

/// Offset window (inclusive) around t = 0, in days.
pub const DEFAULT_STACK_WINDOW: (i64, i64) = (-100, 700);
/// Log-binning resolution for decay fits.
pub const DEFAULT_BINS_PER_DECADE: u32 = 10;
/// Repo-creation and activity-peak tolerance around the start date.
pub const DEFAULT_PEAK_WINDOW_DAYS: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    None,
    PerPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    Sum,
    Mean,
}

/// Daily counts aligned to hackathon start (offset 0), stacked over
/// hackathons. Offsets are dense and strictly increasing over the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackedSeries {
    pub offsets: Vec<i64>,
    pub values: Vec<f64>,
    /// Number of hackathons contributing to the stack.
    pub n_stacked: usize,
    pub normalization: Normalization,
    pub aggregate: Aggregate,
}

impl StackedSeries {
    pub fn value_at(&self, offset: i64) -> Option<f64> {
        self.offsets
            .binary_search(&offset)
            .ok()
            .map(|i| self.values[i])
    }
}
