//! Scale-space analysis: similarity between partitions across scales,
//! breakpoint detection and per-user scale profiles.

mod breakpoints;
mod profiles;
mod similarity;

use serde::{Deserialize, Serialize};

pub use breakpoints::{
    detect_breakpoints, interval_separation, prototypical_scale, BreakpointSet, CutConvention,
    Separation, SeparationOptions, WithinAggregate, DEFAULT_MIN_INTERVAL,
};
pub use profiles::{
    class_label, user_movements, user_profiles, ProfileClass, ProfileReport, UserMovements,
    UserScaleProfile,
};
pub use similarity::{pair_agreements, rand_similarity, similarity_matrix, SimilarityMatrix};

use crate::error::{Error, Result};
use crate::graph::PercentileTable;

/// A contiguous range of scales between two breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalScale {
    pub lo: usize,
    pub hi: usize,
    pub prototype: usize,
    /// Distance threshold of the largest scale in the range.
    pub threshold_km: f64,
}

impl NaturalScale {
    pub fn contains(&self, scale: usize) -> bool {
        (self.lo..=self.hi).contains(&scale)
    }
}

/// Natural scales for the intervals of `breakpoints`.
pub fn natural_scales(
    matrix: &SimilarityMatrix,
    breakpoints: &BreakpointSet,
    table: &PercentileTable,
) -> Result<Vec<NaturalScale>> {
    if breakpoints.n_scales() != matrix.size() || table.thresholds().len() < matrix.size() {
        return Err(Error::Input(format!(
            "breakpoints over {} scales do not match a {}-scale matrix",
            breakpoints.n_scales(),
            matrix.size()
        )));
    }
    breakpoints
        .intervals()
        .into_iter()
        .map(|r| {
            Ok(NaturalScale {
                lo: *r.start(),
                hi: *r.end(),
                prototype: prototypical_scale(matrix, r.clone())?,
                threshold_km: table.thresholds()[*r.end() - 1],
            })
        })
        .collect()
}
