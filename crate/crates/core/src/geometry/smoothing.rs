use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VoronoiDiagram;
use crate::community::Partition;

pub const DEFAULT_MAX_SMOOTH_ITERS: usize = 100;

/// Community labels of one cell across several scales, compared as a whole.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScaleTuple(pub Vec<u32>);

#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed<T> {
    pub labels: Vec<T>,
    /// Synchronous passes that changed at least one cell.
    pub passes: usize,
    /// `false` when the pass budget ran out before a fixpoint was reached.
    pub converged: bool,
}

/// Label held by a strict majority (more than half) of the cell together
/// with its neighbours, if any.
pub(crate) fn strict_majority<'a, T: PartialEq>(
    own: &'a T,
    neighbours: impl Iterator<Item = &'a T>,
) -> Option<&'a T> {
    let mut counts: Vec<(&T, usize)> = vec![(own, 1)];
    let mut size = 1;
    for v in neighbours {
        size += 1;
        match counts.iter_mut().find(|(k, _)| *k == v) {
            Some(entry) => entry.1 += 1,
            None => counts.push((v, 1)),
        }
    }
    counts
        .into_iter()
        .find(|&(_, c)| 2 * c > size)
        .map(|(k, _)| k)
}

/// Synchronous majority rule: every cell whose neighbourhood (itself plus
/// its Voronoi neighbours) has a strict-majority value different from its
/// own adopts that value. Repeats until nothing changes or `max_iters`
/// passes have run.
pub fn majority_smooth<T>(labels: &[T], adjacency: &[Vec<usize>], max_iters: usize) -> Smoothed<T>
where
    T: Clone + PartialEq + Send + Sync,
{
    let mut current = labels.to_vec();
    let mut passes = 0;
    let mut converged = false;
    for _ in 0..max_iters {
        let next: Vec<T> = (0..current.len())
            .into_par_iter()
            .map(|i| {
                let own = &current[i];
                match strict_majority(own, adjacency[i].iter().map(|&j| &current[j])) {
                    Some(m) if m != own => m.clone(),
                    _ => own.clone(),
                }
            })
            .collect();
        if next == current {
            converged = true;
            break;
        }
        current = next;
        passes += 1;
    }
    Smoothed {
        labels: current,
        passes,
        converged,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPartition {
    pub partition: Partition,
    pub passes: usize,
    pub converged: bool,
}

/// Majority smoothing of one partition over the diagram's cells. The
/// result is re-densified and keeps the source scale.
pub fn smooth(partition: &Partition, diagram: &VoronoiDiagram, max_iters: usize) -> SmoothedPartition {
    assert_eq!(partition.len(), diagram.len(), "partition must cover every cell");
    let out = majority_smooth(partition.labels(), diagram.adjacency(), max_iters);
    let mut smoothed = Partition::from_labels(&out.labels);
    smoothed.source_scale = partition.source_scale;
    SmoothedPartition {
        partition: smoothed,
        passes: out.passes,
        converged: out.converged,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleSmoothed {
    pub tuples: Vec<ScaleTuple>,
    pub passes: usize,
    pub converged: bool,
}

/// Smoothing over per-cell tuples built from `partitions` (one per natural
/// scale, in scale order). A tuple only moves as a whole.
pub fn smooth_multiscale(
    partitions: &[Partition],
    diagram: &VoronoiDiagram,
    max_iters: usize,
) -> MultiscaleSmoothed {
    for p in partitions {
        assert_eq!(p.len(), diagram.len(), "partition must cover every cell");
    }
    let tuples: Vec<ScaleTuple> = (0..diagram.len())
        .map(|i| ScaleTuple(partitions.iter().map(|p| p.label(i)).collect()))
        .collect();
    let out = majority_smooth(&tuples, diagram.adjacency(), max_iters);
    MultiscaleSmoothed {
        tuples: out.labels,
        passes: out.passes,
        converged: out.converged,
    }
}
