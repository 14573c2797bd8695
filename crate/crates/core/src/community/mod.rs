//! Louvain modularity maximisation, best-of-N selection and exhaustive
//! merging into two communities.
//!
//! Gains are compared in exact integer arithmetic: with integer edge
//! weights, `2W * k_i,in(C) - Sigma_tot(C) * k_i` is proportional to the
//! modularity change of moving vertex `i` into community `C`, so every
//! accepted move strictly increases modularity and runs are bit-for-bit
//! reproducible.

mod partition;

pub use partition::Partition;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{modularity_fraction, WeightedGraph};

/// Largest community count accepted by [`force_bipartition`].
pub const MAX_BIPARTITION_COMMUNITIES: usize = 25;

/// Graph at one aggregation level, in CSR form.
struct Level {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<u64>,
    /// Internal weight of every aggregated vertex, counted once.
    self_loops: Vec<u64>,
    strength: Vec<u64>,
}

impl Level {
    fn from_triples(n: usize, triples: &[(usize, usize, u64)], self_loops: Vec<u64>) -> Self {
        let mut count = vec![0usize; n + 1];
        for &(u, v, _) in triples {
            count[u + 1] += 1;
            count[v + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let offsets = count.clone();
        let mut cursor = count;
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0; offsets[n]];
        let mut strength: Vec<u64> = self_loops.iter().map(|w| 2 * w).collect();
        for &(u, v, w) in triples {
            targets[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            weights[cursor[v]] = w;
            cursor[v] += 1;
            strength[u] += w;
            strength[v] += w;
        }
        Self {
            offsets,
            targets,
            weights,
            self_loops,
            strength,
        }
    }

    fn from_graph(graph: &WeightedGraph) -> Self {
        let triples: Vec<_> = graph.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        Self::from_triples(graph.vertex_count(), &triples, vec![0; graph.vertex_count()])
    }

    fn len(&self) -> usize {
        self.strength.len()
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    /// Collapses every community into one vertex. `community` must be dense
    /// in `0..k`.
    fn aggregate(&self, community: &[usize], k: usize) -> Level {
        let mut self_loops = vec![0u64; k];
        let mut between: Vec<(usize, usize, u64)> = Vec::new();
        for i in 0..self.len() {
            let ci = community[i];
            self_loops[ci] += self.self_loops[i];
            for (j, w) in self.neighbours(i) {
                if j <= i {
                    continue;
                }
                let cj = community[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    between.push((ci.min(cj), ci.max(cj), w));
                }
            }
        }
        between.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut merged: Vec<(usize, usize, u64)> = Vec::with_capacity(between.len());
        for (a, b, w) in between {
            match merged.last_mut() {
                Some(last) if last.0 == a && last.1 == b => last.2 += w,
                _ => merged.push((a, b, w)),
            }
        }
        Level::from_triples(k, &merged, self_loops)
    }

    /// Local moving phase. Returns the community of every vertex and whether
    /// any vertex moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let two_w: i128 = self.strength.iter().map(|&k| k as i128).sum();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total: Vec<i128> = self.strength.iter().map(|&k| k as i128).collect();
        let mut link = vec![0i128; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut any_move = false;

        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let ki = self.strength[i] as i128;
                if ki == 0 {
                    continue;
                }
                let own = community[i];
                for (j, w) in self.neighbours(i) {
                    let c = community[j];
                    if link[c] == 0 {
                        touched.push(c);
                    }
                    link[c] += w as i128;
                }
                total[own] -= ki;
                let mut best = own;
                let mut best_score = two_w * link[own] - total[own] * ki;
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let score = two_w * link[c] - total[c] * ki;
                    if score > best_score || (score == best_score && best != own && c < best) {
                        best = c;
                        best_score = score;
                    }
                }
                total[best] += ki;
                if best != own {
                    community[i] = best;
                    moved = true;
                }
                for c in touched.drain(..) {
                    link[c] = 0;
                }
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (community, any_move)
    }
}

/// Dense relabeling by order of first appearance.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let out = labels
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

fn louvain_labels(graph: &WeightedGraph, seed: u64) -> Result<Vec<u32>> {
    if graph.edges().is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(graph);
    let mut membership: Vec<usize> = (0..graph.vertex_count()).collect();
    #[cfg(debug_assertions)]
    let mut last_q = {
        let singletons: Vec<u32> = (0..graph.vertex_count() as u32).collect();
        modularity_fraction(graph, &singletons)?.0
    };

    loop {
        let (community, moved) = level.local_moving(&mut rng);
        if !moved {
            break;
        }
        let (dense, k) = densify(&community);
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        #[cfg(debug_assertions)]
        {
            let labels: Vec<u32> = membership.iter().map(|&m| m as u32).collect();
            let q = modularity_fraction(graph, &labels)?.0;
            debug_assert!(q >= last_q, "modularity decreased across aggregation");
            last_q = q;
        }
        level = level.aggregate(&dense, k);
    }
    Ok(membership.into_iter().map(|m| m as u32).collect())
}

/// One seeded Louvain run.
pub fn louvain(graph: &WeightedGraph, seed: u64) -> Result<Partition> {
    let labels = louvain_labels(graph, seed)?;
    let (num, den) = modularity_fraction(graph, &labels)?;
    Ok(Partition::from_labels(&labels).with_quality(num as f64 / den as f64))
}

/// Runs Louvain with seeds `seed + 1 ..= seed + runs` and keeps the run with
/// the highest modularity; ties go to the lowest run index.
pub fn best_louvain(graph: &WeightedGraph, runs: usize, seed: u64) -> Result<Partition> {
    if runs == 0 {
        return Err(Error::Config("Louvain needs at least one run".into()));
    }
    let candidates: Vec<(i128, Vec<u32>)> = (1..=runs as u64)
        .into_par_iter()
        .map(|r| {
            let labels = louvain_labels(graph, seed.wrapping_add(r))?;
            let (num, _) = modularity_fraction(graph, &labels)?;
            Ok((num, labels))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.0 > candidates[best].0 {
            best = i;
        }
    }
    let labels = &candidates[best].1;
    let (num, den) = modularity_fraction(graph, labels)?;
    Ok(Partition::from_labels(labels).with_quality(num as f64 / den as f64))
}

/// Best merge of the communities of `partition` into two groups.
///
/// Every split of the `k` communities into two non-empty groups is
/// evaluated (`2^(k-1) - 1` candidates, community 0 always stays in the
/// first group). Ties go to the smallest bitmask, where bit `c` is set when
/// community `c` is in the second group.
pub fn force_bipartition(graph: &WeightedGraph, partition: &Partition) -> Result<Partition> {
    let k = partition.n_communities();
    if partition.len() != graph.vertex_count() {
        return Err(Error::PartitionSize {
            expected: graph.vertex_count(),
            got: partition.len(),
        });
    }
    if k < 2 {
        return Err(Error::SingleCommunity);
    }
    if k > MAX_BIPARTITION_COMMUNITIES {
        return Err(Error::TooManyCommunities(k));
    }
    let total = graph.total_weight() as i128;
    if total == 0 {
        return Err(Error::ZeroWeight);
    }

    let labels = partition.labels();
    let mut between = vec![vec![0i128; k]; k];
    let mut degree = vec![0i128; k];
    for e in graph.edges() {
        let (a, b) = (labels[e.u] as usize, labels[e.v] as usize);
        let w = e.weight as i128;
        degree[a] += w;
        degree[b] += w;
        if a != b {
            between[a][b] += w;
            between[b][a] += w;
        }
    }
    let external: Vec<i128> = between.iter().map(|row| row.iter().sum()).collect();

    let score = |cut: i128, deg_b: i128| {
        let deg_a = 2 * total - deg_b;
        4 * total * (total - cut) - deg_a * deg_a - deg_b * deg_b
    };

    // Gray code over communities 1..k; conn[c] = weight from c into group B.
    let mut in_b = vec![false; k];
    let mut conn = vec![0i128; k];
    let (mut cut, mut deg_b) = (0i128, 0i128);
    let mut best: Option<(i128, u64)> = None;
    for step in 1u64..(1u64 << (k - 1)) {
        let c = step.trailing_zeros() as usize + 1;
        if in_b[c] {
            for d in 0..k {
                conn[d] -= between[d][c];
            }
            cut += 2 * conn[c] - external[c];
            deg_b -= degree[c];
        } else {
            cut += external[c] - 2 * conn[c];
            for d in 0..k {
                conn[d] += between[d][c];
            }
            deg_b += degree[c];
        }
        in_b[c] = !in_b[c];
        let mask = (step ^ (step >> 1)) << 1;
        let q = score(cut, deg_b);
        best = match best {
            Some((bq, bm)) if bq > q || (bq == q && bm < mask) => Some((bq, bm)),
            _ => Some((q, mask)),
        };
    }

    let (_, mask) = best.expect("k >= 2 yields at least one candidate");
    let merged: Vec<u32> = labels.iter().map(|&c| ((mask >> c) & 1) as u32).collect();
    let (num, den) = modularity_fraction(graph, &merged)?;
    let mut out = Partition::from_labels(&merged).with_quality(num as f64 / den as f64);
    out.source_scale = partition.source_scale;
    Ok(out)
}
