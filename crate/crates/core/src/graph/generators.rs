//! Random graph generators used by tests, benchmarks and the acceptance
//! suite.

use rand::Rng;

use super::{Edge, WeightedGraph};

/// Planted partition graph: `n` vertices split into `blocks` contiguous
/// blocks of (nearly) equal size; each pair inside a block is joined with
/// probability `p_in`, each pair across blocks with `p_out`. Returns the
/// graph and the planted labels.
pub fn planted_partition<R: Rng + ?Sized>(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> (WeightedGraph, Vec<u32>) {
    let labels: Vec<u32> = (0..n).map(|i| (i * blocks / n) as u32).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random_bool(p) {
                edges.push(Edge {
                    u,
                    v,
                    weight: 1,
                    distance_km: 1.0,
                });
            }
        }
    }
    let graph = WeightedGraph::new(n, edges).expect("generated edges are canonical");
    (graph, labels)
}

/// Erdős–Rényi graph with integer weights drawn uniformly from
/// `1..=max_weight` and distances uniform in `(0, 100]` km.
pub fn random_weighted<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    max_weight: u64,
    rng: &mut R,
) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push(Edge {
                    u,
                    v,
                    weight: rng.random_range(1..=max_weight),
                    distance_km: 100.0 - rng.random_range(0.0..100.0),
                });
            }
        }
    }
    WeightedGraph::new(n, edges).expect("generated edges are canonical")
}
