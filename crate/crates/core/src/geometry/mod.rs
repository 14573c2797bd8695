//! Voronoi tessellation of the seed locations, majority smoothing over the
//! cell adjacency and boundary extraction.

mod smoothing;
mod voronoi;

pub use smoothing::{
    majority_smooth, smooth, smooth_multiscale, MultiscaleSmoothed, ScaleTuple, Smoothed,
    SmoothedPartition, DEFAULT_MAX_SMOOTH_ITERS,
};
pub use voronoi::{build_voronoi, BBox, VoronoiDiagram, DEFAULT_BBOX_MARGIN};

use crate::community::Partition;
use crate::geo::GeoPoint;

/// A shared Voronoi edge between two cells whose labels differ.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySegment {
    pub cells: (usize, usize),
    pub xy: [[f64; 2]; 2],
    pub line: [GeoPoint; 2],
    /// 1-based positions in the scale tuple at which the two cells differ.
    pub scales: Vec<usize>,
}

impl BoundarySegment {
    /// Length in projected kilometres.
    pub fn length(&self) -> f64 {
        let [a, b] = self.xy;
        (b[0] - a[0]).hypot(b[1] - a[1])
    }
}

/// Boundary segments between adjacent cells with differing tuples, in
/// adjacency order.
pub fn extract_boundaries(tuples: &[ScaleTuple], diagram: &VoronoiDiagram) -> Vec<BoundarySegment> {
    assert_eq!(tuples.len(), diagram.len(), "one tuple per cell");
    diagram
        .shared_edges()
        .filter_map(|((a, b), xy)| {
            let scales: Vec<usize> = tuples[a]
                .0
                .iter()
                .zip(&tuples[b].0)
                .enumerate()
                .filter(|(_, (x, y))| x != y)
                .map(|(i, _)| i + 1)
                .collect();
            (!scales.is_empty()).then(|| BoundarySegment {
                cells: (a, b),
                xy,
                line: [diagram.unproject(xy[0]), diagram.unproject(xy[1])],
                scales,
            })
        })
        .collect()
}

/// Boundaries of a single partition; every segment is tagged `[1]`.
pub fn partition_boundaries(partition: &Partition, diagram: &VoronoiDiagram) -> Vec<BoundarySegment> {
    let tuples: Vec<ScaleTuple> = partition
        .labels()
        .iter()
        .map(|&c| ScaleTuple(vec![c]))
        .collect();
    extract_boundaries(&tuples, diagram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> VoronoiDiagram {
        VoronoiDiagram::planar(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], 0.05).unwrap()
    }

    #[test]
    fn uniform_labels_have_no_boundary() {
        let d = square();
        assert!(partition_boundaries(&Partition::uniform(4), &d).is_empty());
    }

    #[test]
    fn left_right_split() {
        let d = square();
        let p = Partition::from_labels(&[0u32, 1, 0, 1]);
        let segs = partition_boundaries(&p, &d);
        // one vertical line through x = 0.5, made of the two shared edges
        assert_eq!(segs.len(), 2);
        for s in &segs {
            assert!((s.xy[0][0] - 0.5).abs() < 1e-12 && (s.xy[1][0] - 0.5).abs() < 1e-12);
            assert_eq!(s.scales, vec![1]);
        }
        let total: f64 = segs.iter().map(BoundarySegment::length).sum();
        assert!((total - 1.1).abs() < 1e-12, "{total}");
    }

    #[test]
    fn tuple_tags() {
        let d = square();
        let t = |a: u32, b: u32, c: u32| ScaleTuple(vec![a, b, c]);
        let tuples = vec![t(0, 0, 0), t(0, 0, 0), t(0, 1, 0), t(0, 0, 0)];
        let segs = extract_boundaries(&tuples, &d);
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|s| s.scales == vec![2]));
    }
}
