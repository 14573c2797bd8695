//! Interval separation and greedy breakpoint search.
//!
//! Scales are numbered from 1. A breakpoint `b` closes the interval ending
//! at scale `b`; breakpoints `b_0 < ... < b_k` yield the intervals
//! `1..=b_0, b_0+1..=b_1, ..., b_k+1..=n`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::SimilarityMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_MIN_INTERVAL: usize = 5;

/// Which pair of scales measures the similarity across a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutConvention {
    /// Every breakpoint `b` contributes `similarity(b, b + 1)`.
    #[default]
    CrossCut,
    /// The first breakpoint is skipped and every other `b` contributes
    /// `similarity(b - 1, b)`.
    Literal,
}

/// How the similarities inside one interval are aggregated before being
/// weighted by the interval size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WithinAggregate {
    /// `|I| * mean(I)`: the size-weighted mean similarity.
    #[default]
    Mean,
    /// `|I| * sum(I)`.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SeparationOptions {
    pub convention: CutConvention,
    pub within: WithinAggregate,
}

/// Interval separation `numerator / denominator`; `value` is `+inf` when the
/// denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
}

impl Separation {
    /// Strictly better: a larger value, or an equally infinite value with a
    /// larger numerator.
    pub fn improves_on(&self, other: &Separation) -> bool {
        self.value > other.value
            || (self.value == other.value && self.value.is_infinite() && self.numerator > other.numerator)
    }

    /// Ranking used to pick among candidates: value, then numerator.
    fn outranks(&self, other: &Separation) -> bool {
        self.value > other.value || (self.value == other.value && self.numerator > other.numerator)
    }
}

/// Breakpoints over `1..=n_scales` that satisfy a minimum interval size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointSet {
    breakpoints: Vec<usize>,
    n_scales: usize,
    min_interval: usize,
    /// Separation of the set; `None` when no breakpoint could be placed.
    pub separation: Option<Separation>,
    /// Sets visited by the greedy search with their separations.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<(Vec<usize>, Separation)>,
}

impl BreakpointSet {
    pub fn new(breakpoints: Vec<usize>, n_scales: usize, min_interval: usize) -> Result<Self> {
        if !valid_set(&breakpoints, n_scales, min_interval) {
            return Err(Error::InvalidBreakpoints(format!(
                "{breakpoints:?} over {n_scales} scales with minimum interval {min_interval}"
            )));
        }
        Ok(Self {
            breakpoints,
            n_scales,
            min_interval,
            separation: None,
            trace: Vec::new(),
        })
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn min_interval(&self) -> usize {
        self.min_interval
    }

    pub fn intervals(&self) -> Vec<RangeInclusive<usize>> {
        intervals(&self.breakpoints, self.n_scales)
    }
}

fn intervals(breakpoints: &[usize], n: usize) -> Vec<RangeInclusive<usize>> {
    let mut out = Vec::with_capacity(breakpoints.len() + 1);
    let mut lo = 1;
    for &b in breakpoints {
        out.push(lo..=b);
        lo = b + 1;
    }
    out.push(lo..=n);
    out
}

fn valid_set(breakpoints: &[usize], n: usize, min_interval: usize) -> bool {
    let min_interval = min_interval.max(1);
    let mut prev = 0;
    for &b in breakpoints {
        if b < prev + min_interval {
            return false;
        }
        prev = b;
    }
    n >= prev + min_interval
}

/// Prefix sums over the matrix so any square block sum costs O(1).
pub(crate) struct BlockSums {
    n: usize,
    prefix: Vec<f64>,
}

impl BlockSums {
    pub(crate) fn new(m: &SimilarityMatrix) -> Self {
        let n = m.size();
        let w = n + 1;
        let mut prefix = vec![0.0; w * w];
        for i in 0..n {
            for j in 0..n {
                prefix[(i + 1) * w + j + 1] =
                    m.get(i, j) + prefix[i * w + j + 1] + prefix[(i + 1) * w + j] - prefix[i * w + j];
            }
        }
        Self { n, prefix }
    }

    /// Sum over all ordered pairs in scales `lo..=hi`.
    fn block(&self, lo: usize, hi: usize) -> f64 {
        let w = self.n + 1;
        let (a, b) = (lo - 1, hi);
        self.prefix[b * w + b] - self.prefix[a * w + b] - self.prefix[b * w + a] + self.prefix[a * w + a]
    }
}

fn separation_with(
    m: &SimilarityMatrix,
    sums: &BlockSums,
    breakpoints: &[usize],
    opts: SeparationOptions,
) -> Separation {
    let numerator: f64 = intervals(breakpoints, m.size())
        .into_iter()
        .map(|r| {
            let size = (r.end() - r.start() + 1) as f64;
            let block = sums.block(*r.start(), *r.end());
            match opts.within {
                WithinAggregate::Mean => block / size,
                WithinAggregate::Sum => size * block,
            }
        })
        .sum();
    let denominator = match opts.convention {
        CutConvention::CrossCut => breakpoints
            .iter()
            .map(|&b| m.get(b - 1, b))
            .fold(0.0, f64::max),
        CutConvention::Literal => breakpoints
            .iter()
            .skip(1)
            .map(|&b| m.get(b - 2, b - 1))
            .fold(0.0, f64::max),
    };
    let value = if denominator > 0.0 {
        numerator / denominator
    } else {
        f64::INFINITY
    };
    Separation {
        value,
        numerator,
        denominator,
    }
}

/// Interval separation of `breakpoints`: size-weighted within-interval
/// similarity divided by the largest similarity across a breakpoint.
pub fn interval_separation(
    matrix: &SimilarityMatrix,
    breakpoints: &[usize],
    opts: SeparationOptions,
) -> Result<Separation> {
    if breakpoints.is_empty() {
        return Err(Error::InvalidBreakpoints("separation needs at least one breakpoint".into()));
    }
    if !valid_set(breakpoints, matrix.size(), 1) {
        return Err(Error::InvalidBreakpoints(format!(
            "{breakpoints:?} is not strictly increasing inside 1..{}",
            matrix.size()
        )));
    }
    Ok(separation_with(matrix, &BlockSums::new(matrix), breakpoints, opts))
}

/// Greedy breakpoint search. The first breakpoint goes to the best valid
/// position unconditionally; further breakpoints are added one at a time,
/// each at the position that maximises separation, while that strictly
/// improves it. Ties go to the lowest position.
pub fn detect_breakpoints(
    matrix: &SimilarityMatrix,
    min_interval: usize,
    opts: SeparationOptions,
) -> Result<BreakpointSet> {
    if min_interval == 0 {
        return Err(Error::Config("minimum interval must be at least 1".into()));
    }
    let n = matrix.size();
    let sums = BlockSums::new(matrix);
    let mut current: Vec<usize> = Vec::new();
    let mut current_sep: Option<Separation> = None;
    let mut trace = Vec::new();

    loop {
        let mut best: Option<(Vec<usize>, Separation)> = None;
        for b in 1..n {
            if current.contains(&b) {
                continue;
            }
            let mut candidate = current.clone();
            let at = candidate.partition_point(|&x| x < b);
            candidate.insert(at, b);
            if !valid_set(&candidate, n, min_interval) {
                continue;
            }
            let sep = separation_with(matrix, &sums, &candidate, opts);
            if best.as_ref().is_none_or(|(_, s)| sep.outranks(s)) {
                best = Some((candidate, sep));
            }
        }
        let Some((candidate, sep)) = best else { break };
        if let Some(cur) = &current_sep {
            if !sep.improves_on(cur) {
                break;
            }
        }
        trace.push((candidate.clone(), sep));
        current = candidate;
        current_sep = Some(sep);
    }

    let mut set = BreakpointSet::new(current, n, min_interval)?;
    set.separation = current_sep;
    set.trace = trace;
    Ok(set)
}

/// Scale in `interval` whose partition is most similar to all others in
/// the interval; ties go to the lowest scale.
pub fn prototypical_scale(matrix: &SimilarityMatrix, interval: RangeInclusive<usize>) -> Result<usize> {
    let (lo, hi) = (*interval.start(), *interval.end());
    if lo == 0 || lo > hi || hi > matrix.size() {
        return Err(Error::Input(format!("invalid interval {lo}..={hi}")));
    }
    let mut best = (lo, f64::NEG_INFINITY);
    for s in lo..=hi {
        let total: f64 = (lo..=hi).map(|t| matrix.get(s - 1, t - 1)).sum();
        if total > best.1 {
            best = (s, total);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Block matrix with `within` inside blocks and `across` between them.
    fn blocks(edges: &[usize], n: usize, within: f64, across: f64) -> SimilarityMatrix {
        let block = |s: usize| edges.iter().filter(|&&e| s > e).count();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                v[i * n + j] = if i == j {
                    1.0
                } else if block(i + 1) == block(j + 1) {
                    within
                } else {
                    across
                };
            }
        }
        SimilarityMatrix::from_values(n, v).unwrap()
    }

    #[test]
    fn intervals_cover_all_scales() {
        let b = BreakpointSet::new(vec![10, 50], 100, 5).unwrap();
        assert_eq!(b.intervals(), vec![1..=10, 11..=50, 51..=100]);
        assert!(BreakpointSet::new(vec![4], 100, 5).is_err());
        assert!(BreakpointSet::new(vec![96], 100, 5).is_err());
        assert!(BreakpointSet::new(vec![10, 14], 100, 5).is_err());
        assert!(BreakpointSet::new(vec![10, 15, 95], 100, 5).is_ok());
    }

    #[test]
    fn separation_of_two_perfect_blocks() {
        let m = blocks(&[50], 100, 1.0, 0.5);
        let mean = interval_separation(&m, &[50], SeparationOptions::default()).unwrap();
        // |I| * mean = 50 per block
        assert_eq!(mean.numerator, 100.0);
        assert_eq!(mean.denominator, 0.5);
        assert_eq!(mean.value, 200.0);
        let sum = interval_separation(
            &m,
            &[50],
            SeparationOptions {
                within: WithinAggregate::Sum,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(sum.numerator, 2.0 * 50.0 * 2500.0);
        assert_eq!(sum.value, 500_000.0);
    }

    #[test]
    fn zero_cross_similarity_is_infinite() {
        let m = blocks(&[30], 100, 1.0, 0.0);
        let s = interval_separation(&m, &[30], SeparationOptions::default()).unwrap();
        assert!(s.value.is_infinite());
    }

    #[test]
    fn empty_set_is_rejected() {
        let m = blocks(&[30], 100, 1.0, 0.0);
        assert!(interval_separation(&m, &[], SeparationOptions::default()).is_err());
    }

    #[test]
    fn true_edge_beats_every_other_cut() {
        let m = blocks(&[50], 100, 1.0, 0.5);
        let opts = SeparationOptions::default();
        let at_edge = interval_separation(&m, &[50], opts).unwrap().value;
        for b in (1..100).filter(|&b| b != 50) {
            assert!(interval_separation(&m, &[b], opts).unwrap().value < at_edge, "cut {b}");
        }
    }

    #[test]
    fn recovers_planted_blocks() {
        let opts = SeparationOptions::default();
        let two = detect_breakpoints(&blocks(&[40], 100, 1.0, 0.3), 5, opts).unwrap();
        assert_eq!(two.breakpoints(), &[40]);
        let three = detect_breakpoints(&blocks(&[30, 70], 100, 1.0, 0.3), 5, opts).unwrap();
        assert_eq!(three.breakpoints(), &[30, 70]);
        // separations along the search never decrease
        assert!(three.trace.windows(2).all(|w| w[1].1.value >= w[0].1.value));
    }

    #[test]
    fn all_ones_gives_one_breakpoint() {
        let m = blocks(&[], 100, 1.0, 1.0);
        let b = detect_breakpoints(&m, 5, SeparationOptions::default()).unwrap();
        assert_eq!(b.breakpoints(), &[5]);
    }

    #[test]
    fn literal_convention_keeps_first_cut_only() {
        let m = blocks(&[30, 70], 100, 1.0, 0.3);
        let opts = SeparationOptions {
            convention: CutConvention::Literal,
            ..Default::default()
        };
        let b = detect_breakpoints(&m, 5, opts).unwrap();
        assert_eq!(b.breakpoints().len(), 1);
        assert!(b.separation.unwrap().value.is_infinite());
    }

    #[test]
    fn too_short_for_any_cut() {
        let m = blocks(&[], 8, 1.0, 1.0);
        let b = detect_breakpoints(&m, 5, SeparationOptions::default()).unwrap();
        assert!(b.breakpoints().is_empty());
        assert_eq!(b.intervals(), vec![1..=8]);
        assert!(b.separation.is_none());
    }

    #[test]
    fn prototype_rules() {
        let m = blocks(&[], 10, 1.0, 1.0);
        assert_eq!(prototypical_scale(&m, 3..=7).unwrap(), 3);
        assert_eq!(prototypical_scale(&m, 4..=4).unwrap(), 4);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(prototypical_scale(&m, empty).is_err());

        let n = 5;
        let mut v = vec![0.5; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
            if i != 2 {
                v[2 * n + i] = 0.9;
                v[i * n + 2] = 0.9;
            }
        }
        let m = SimilarityMatrix::from_values(n, v).unwrap();
        assert_eq!(prototypical_scale(&m, 1..=5).unwrap(), 3);
    }
}
