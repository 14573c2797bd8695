use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::graph::ScaleIndex;

/// Assignment of every location to a community, labels dense in
/// `0..n_communities`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<u32>,
    n_communities: usize,
    pub source_scale: Option<ScaleIndex>,
    /// Modularity of this partition on the graph it was computed for.
    pub quality: Option<f64>,
}

impl Partition {
    /// Relabels arbitrary values densely, in order of first appearance.
    pub fn from_labels<T: Eq + Hash + Clone>(values: &[T]) -> Self {
        let mut ids: HashMap<T, u32> = HashMap::new();
        let labels = values
            .iter()
            .map(|v| {
                let next = ids.len() as u32;
                *ids.entry(v.clone()).or_insert(next)
            })
            .collect::<Vec<_>>();
        Self {
            n_communities: ids.len().max(usize::from(!labels.is_empty())),
            labels,
            source_scale: None,
            quality: None,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n as u32).collect::<Vec<_>>())
    }

    pub fn uniform(n: usize) -> Self {
        Self::from_labels(&vec![0u32; n])
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, location: usize) -> u32 {
        self.labels[location]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn with_scale(mut self, s: ScaleIndex) -> Self {
        self.source_scale = Some(s);
        self
    }

    pub fn with_quality(mut self, q: f64) -> Self {
        self.quality = Some(q);
        self
    }

    /// Member lists per community.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }

    /// `location_id,community` CSV; `ids` maps a vertex index to the id
    /// written in the file.
    pub fn to_csv(&self, ids: impl Fn(usize) -> u64) -> String {
        let mut out = String::from("location_id,community\n");
        for (i, c) in self.labels.iter().enumerate() {
            out.push_str(&format!("{},{}\n", ids(i), c));
        }
        out
    }
}
