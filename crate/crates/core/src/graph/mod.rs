//! Weighted co-location graphs, distance percentiles and modularity.

pub mod generators;

use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};

/// Number of distance percentiles, i.e. scales.
pub const SCALES: usize = 100;

/// One undirected edge in canonical `u < v` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Number of distinct users observed at both endpoints.
    pub weight: u64,
    pub distance_km: f64,
}

/// Undirected, loop-free graph over locations `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph, canonicalising every edge to `u < v`. Rejects
    /// self-loops, duplicate pairs, zero weights, out-of-range endpoints and
    /// non-finite or negative distances.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut out: Vec<Edge> = Vec::new();
        for mut e in edges {
            if e.u == e.v {
                return Err(Error::Input(format!("self-loop on vertex {}", e.u)));
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            if e.v >= n {
                return Err(Error::Input(format!(
                    "edge ({}, {}) out of range for {n} vertices",
                    e.u, e.v
                )));
            }
            if e.weight == 0 {
                return Err(Error::Input(format!("edge ({}, {}) has zero weight", e.u, e.v)));
            }
            if !e.distance_km.is_finite() || e.distance_km < 0.0 {
                return Err(Error::Input(format!(
                    "edge ({}, {}) has invalid distance {}",
                    e.u, e.v, e.distance_km
                )));
            }
            out.push(e);
        }
        out.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = out.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            return Err(Error::Input(format!("duplicate edge ({}, {})", w[0].u, w[0].v)));
        }
        Ok(Self { n, edges: out })
    }

    /// Unit-weight, unit-distance graph; mostly useful in tests.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n,
            pairs.iter().map(|&(u, v)| Edge {
                u,
                v,
                weight: 1,
                distance_km: 1.0,
            }),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weighted degree of every vertex.
    pub fn strengths(&self) -> Vec<u64> {
        let mut k = vec![0u64; self.n];
        for e in &self.edges {
            k[e.u] += e.weight;
            k[e.v] += e.weight;
        }
        k
    }

    /// Number of incident edges of every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by_key(&(a, b), |e| (e.u, e.v))
            .map(|i| self.edges[i].weight)
            .unwrap_or(0)
    }

    pub fn max_distance(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.distance_km).reduce(f64::max)
    }

    pub(crate) fn with_edges(&self, edges: Vec<Edge>) -> Self {
        Self { n: self.n, edges }
    }
}

/// A distance percentile `s` in `1..=100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ScaleIndex(usize);

impl ScaleIndex {
    pub fn new(s: usize) -> Result<Self> {
        if (1..=SCALES).contains(&s) {
            Ok(Self(s))
        } else {
            Err(Error::Input(format!("scale index {s} outside 1..=100")))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn all() -> impl Iterator<Item = ScaleIndex> {
        (1..=SCALES).map(ScaleIndex)
    }
}

impl TryFrom<usize> for ScaleIndex {
    type Error = Error;
    fn try_from(s: usize) -> Result<Self> {
        Self::new(s)
    }
}

impl From<ScaleIndex> for usize {
    fn from(s: ScaleIndex) -> usize {
        s.0
    }
}

/// How percentile mass is counted when ranking edges by distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentileMode {
    /// Each edge counts with its user weight.
    #[default]
    ByWeight,
    /// Each edge counts once.
    ByEdge,
}

impl std::str::FromStr for PercentileMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "by_weight" => Ok(Self::ByWeight),
            "by_edge" => Ok(Self::ByEdge),
            other => Err(Error::Config(format!("unknown percentile mode `{other}`"))),
        }
    }
}

/// Distance thresholds `m_1..m_100` in kilometres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileTable {
    thresholds: Vec<f64>,
    pub mode: PercentileMode,
}

impl PercentileTable {
    /// Threshold for scale `s`.
    pub fn threshold(&self, s: ScaleIndex) -> f64 {
        self.thresholds[s.get() - 1]
    }

    /// All 100 thresholds, index `s - 1`.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// `s,threshold_km` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,threshold_km\n");
        for (i, m) in self.thresholds.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, m));
        }
        out
    }
}

/// `m_s` is the smallest edge distance `d` such that edges no longer than
/// `d` carry at least `s`% of the total mass.
pub fn percentile_table(graph: &WeightedGraph, mode: PercentileMode) -> Result<PercentileTable> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut sorted: Vec<(f64, u64)> = graph
        .edges
        .iter()
        .map(|e| {
            let mass = match mode {
                PercentileMode::ByWeight => e.weight,
                PercentileMode::ByEdge => 1,
            };
            (e.distance_km, mass)
        })
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: u128 = sorted.iter().map(|&(_, w)| w as u128).sum();

    let mut thresholds = Vec::with_capacity(SCALES);
    let mut idx = 0usize;
    let mut cum: u128 = sorted[0].1 as u128;
    for s in 1..=SCALES as u128 {
        // integer form of cum / total >= s / 100
        while cum * 100 < s * total {
            idx += 1;
            cum += sorted[idx].1 as u128;
        }
        thresholds.push(sorted[idx].0);
    }
    debug_assert!(thresholds.windows(2).all(|w| w[0] <= w[1]));
    Ok(PercentileTable { thresholds, mode })
}

/// The graph at scale `s`: every vertex, and the edges with
/// `distance <= m_s`.
pub fn percentile_graph(
    graph: &WeightedGraph,
    table: &PercentileTable,
    s: ScaleIndex,
) -> WeightedGraph {
    let limit = table.threshold(s);
    graph.with_edges(
        graph
            .edges
            .iter()
            .filter(|e| e.distance_km <= limit)
            .copied()
            .collect(),
    )
}

/// Weighted Newman modularity of `partition` on `graph`.
pub fn modularity(graph: &WeightedGraph, partition: &Partition) -> Result<f64> {
    modularity_of_labels(graph, partition.labels())
}

pub fn modularity_of_labels(graph: &WeightedGraph, labels: &[u32]) -> Result<f64> {
    let (num, den) = modularity_fraction(graph, labels)?;
    Ok(num as f64 / den as f64)
}

/// Modularity as an exact fraction `num / den` with `den = 4 W^2`:
/// `Q = (4 W sum_c in_c - sum_c deg_c^2) / (4 W^2)`.
pub(crate) fn modularity_fraction(graph: &WeightedGraph, labels: &[u32]) -> Result<(i128, i128)> {
    if labels.len() != graph.n {
        return Err(Error::PartitionSize {
            expected: graph.n,
            got: labels.len(),
        });
    }
    let total = graph.total_weight() as i128;
    if total == 0 {
        return Err(Error::ZeroWeight);
    }
    let k = labels.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut inside = vec![0i128; k];
    let mut degree = vec![0i128; k];
    for e in &graph.edges {
        let (cu, cv) = (labels[e.u] as usize, labels[e.v] as usize);
        let w = e.weight as i128;
        degree[cu] += w;
        degree[cv] += w;
        if cu == cv {
            inside[cu] += w;
        }
    }
    let sum_in: i128 = inside.iter().sum();
    let sum_deg_sq: i128 = degree.iter().map(|d| d * d).sum();
    Ok((4 * total * sum_in - sum_deg_sq, 4 * total * total))
}
