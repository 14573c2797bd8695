//! Brute-force reference implementations used to check the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use natscale::WeightedGraph;

/// Rand index by enumerating every unordered pair.
pub fn rand_pairs(a: &[u32], b: &[u32]) -> f64 {
    let n = a.len();
    let mut agree = 0u64;
    let mut total = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            total += 1;
            if (a[i] == a[j]) == (b[i] == b[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

/// Modularity as the double sum of `A_ij - k_i k_j / 2W` over same-label
/// pairs, divided by `2W`.
pub fn modularity_pairwise(g: &WeightedGraph, labels: &[u32]) -> f64 {
    let n = g.vertex_count();
    let mut a = vec![0.0; n * n];
    for e in g.edges() {
        a[e.u * n + e.v] += e.weight as f64;
        a[e.v * n + e.u] += e.weight as f64;
    }
    let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i * n + j]).sum()).collect();
    let two_w: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i * n + j] - k[i] * k[j] / two_w;
            }
        }
    }
    q / two_w
}

/// Every set partition of `0..n` as restricted-growth label strings.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(labels: &mut Vec<u32>, max: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        for c in 0..=max + 1 {
            labels.push(c);
            rec(labels, max.max(c), n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut labels = vec![0];
    rec(&mut labels, 0, n, &mut out);
    out
}

/// Best merge of the communities of `labels` into two groups, by trying
/// every assignment of communities to groups. Ties go to the assignment
/// whose second group, read as a bitmask over community ids, is smallest.
pub fn best_bipartition(g: &WeightedGraph, labels: &[u32]) -> (f64, Vec<u32>) {
    let k = labels.iter().copied().max().unwrap() as usize + 1;
    let mut best: Option<(f64, Vec<u32>)> = None;
    for mask in 1u64..(1 << k) - 1 {
        if mask & 1 == 1 {
            continue;
        }
        let merged: Vec<u32> = labels.iter().map(|&c| ((mask >> c) & 1) as u32).collect();
        let q = modularity_pairwise(g, &merged);
        if best.as_ref().is_none_or(|(bq, _)| q > *bq + 1e-12) {
            best = Some((q, merged));
        }
    }
    best.unwrap()
}

/// Canonical form: labels renumbered by first appearance.
pub fn canonical(labels: &[u32]) -> Vec<u32> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&c| {
            let next = map.len() as u32;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Size-weighted mean within-interval similarity over the largest
/// similarity across a cut, with plain loops. Scales are 1-based.
pub fn separation(m: &[f64], n: usize, cuts: &[usize]) -> (f64, f64) {
    let mut bounds = vec![0];
    bounds.extend_from_slice(cuts);
    bounds.push(n);
    let mut numerator = 0.0;
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let size = (hi - lo) as f64;
        let mut sum = 0.0;
        for i in lo..hi {
            for j in lo..hi {
                sum += m[i * n + j];
            }
        }
        numerator += sum / size;
    }
    let denominator = cuts.iter().map(|&b| m[(b - 1) * n + b]).fold(0.0, f64::max);
    let sigma = if denominator > 0.0 { numerator / denominator } else { f64::INFINITY };
    (sigma, numerator)
}

/// Best set of at most `max_cuts` breakpoints with every interval at least
/// `min_interval` long, by enumerating every valid set. Block sums come from
/// a 2-D prefix table so the enumeration stays cheap.
pub fn best_breakpoints(m: &[f64], n: usize, min_interval: usize, max_cuts: usize) -> Vec<usize> {
    let mut prefix = vec![0.0; (n + 1) * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            prefix[(i + 1) * (n + 1) + j + 1] = m[i * n + j] + prefix[i * (n + 1) + j + 1]
                + prefix[(i + 1) * (n + 1) + j]
                - prefix[i * (n + 1) + j];
        }
    }
    let block = |lo: usize, hi: usize| {
        prefix[hi * (n + 1) + hi] - prefix[lo * (n + 1) + hi] - prefix[hi * (n + 1) + lo]
            + prefix[lo * (n + 1) + lo]
    };
    let score = |cuts: &[usize]| {
        let mut bounds = vec![0];
        bounds.extend_from_slice(cuts);
        bounds.push(n);
        let numerator: f64 = bounds.windows(2).map(|w| block(w[0], w[1]) / (w[1] - w[0]) as f64).sum();
        let denominator = cuts.iter().map(|&b| m[(b - 1) * n + b]).fold(0.0, f64::max);
        let sigma = if denominator > 0.0 { numerator / denominator } else { f64::INFINITY };
        (sigma, numerator)
    };

    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(cuts) = stack.pop() {
        if !cuts.is_empty() {
            let (s, num) = score(&cuts);
            let better = match &best {
                None => true,
                Some((bs, bn, bc)) => {
                    s > *bs || (s == *bs && (num > *bn || (num == *bn && cuts < *bc)))
                }
            };
            if better {
                best = Some((s, num, cuts.clone()));
            }
        }
        if cuts.len() == max_cuts {
            continue;
        }
        let start = cuts.last().map_or(min_interval, |&b| b + min_interval);
        for b in start..=n.saturating_sub(min_interval) {
            let mut next = cuts.clone();
            next.push(b);
            stack.push(next);
        }
    }
    best.map(|(_, _, c)| c).unwrap_or_default()
}

/// Symmetric block matrix: entries inside a block uniform in `within`,
/// across blocks uniform in `across`, unit diagonal. `edges` are the last
/// scales of every block but the final one.
pub fn block_matrix<R: rand::Rng>(
    n: usize,
    edges: &[usize],
    within: std::ops::Range<f64>,
    across: std::ops::Range<f64>,
    rng: &mut R,
) -> Vec<f64> {
    let block = |s: usize| edges.iter().filter(|&&e| s >= e).count();
    let mut m = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if block(i) == block(j) {
                rng.random_range(within.clone())
            } else {
                rng.random_range(across.clone())
            };
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Index of the nearest point by linear scan; ties go to the lowest index.
pub fn nearest(points: &[[f64; 2]], p: [f64; 2]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, q) in points.iter().enumerate() {
        let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

/// Distance from `p` to the nearest bisector between its nearest seed and
/// any other seed.
pub fn bisector_gap(points: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let i = nearest(points, p);
    let a = points[i];
    points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, b)| {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            ((p[0] - mid[0]) * dx + (p[1] - mid[1]) * dy).abs() / len
        })
        .fold(f64::INFINITY, f64::min)
}

/// Users per location and, for every location pair, the number of users
/// seen at both; counted from (user, location) visits.
pub fn colocation_counts(visits: &[(String, usize)]) -> BTreeMap<(usize, usize), u64> {
    let mut by_location: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
    for (u, l) in visits {
        by_location.entry(*l).or_default().insert(u);
    }
    let locations: Vec<_> = by_location.keys().copied().collect();
    let mut out = BTreeMap::new();
    for (i, &a) in locations.iter().enumerate() {
        for &b in &locations[i + 1..] {
            let shared = by_location[&a].intersection(&by_location[&b]).count() as u64;
            if shared > 0 {
                out.insert((a, b), shared);
            }
        }
    }
    out
}

/// Like [`block_matrix`], but every pair of blocks shares one similarity
/// drawn from `across`.
pub fn block_matrix_constant_cross<R: rand::Rng>(
    n: usize,
    edges: &[usize],
    within: std::ops::Range<f64>,
    across: std::ops::Range<f64>,
    rng: &mut R,
) -> Vec<f64> {
    let block = |s: usize| edges.iter().filter(|&&e| s >= e).count();
    let k = edges.len() + 1;
    let mut cross = vec![0.0; k * k];
    for a in 0..k {
        for b in a + 1..k {
            let v = rng.random_range(across.clone());
            cross[a * k + b] = v;
            cross[b * k + a] = v;
        }
    }
    let mut m = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (block(i), block(j));
            let v = if a == b { rng.random_range(within.clone()) } else { cross[a * k + b] };
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Scale-class counts recomputed from raw events: every event goes to its
/// nearest seed by linear scan, events at dropped seeds are ignored, and each
/// pair of distinct visited seeds lands in the first scale whose upper
/// threshold covers it (the last scale otherwise). Returns, per class
/// label, the number of users and their summed visited-location counts.
pub fn profile_recount(
    events: &[(String, f64, f64)],
    seeds: &[(f64, f64)],
    keep: &[bool],
    thresholds: &[f64],
) -> BTreeMap<String, (usize, usize)> {
    let mut visited: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (user, lat, lon) in events {
        let mut best = (f64::INFINITY, 0);
        for (i, &(slat, slon)) in seeds.iter().enumerate() {
            let d = natscale::haversine_km(*lat, *lon, slat, slon);
            if d < best.0 {
                best = (d, i);
            }
        }
        if keep[best.1] {
            visited.entry(user).or_default().insert(best.1);
        }
    }
    let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for locs in visited.values() {
        let locs: Vec<usize> = locs.iter().copied().collect();
        let mut scales = BTreeSet::new();
        for i in 0..locs.len() {
            for j in i + 1..locs.len() {
                let (a, b) = (seeds[locs[i]], seeds[locs[j]]);
                let d = natscale::haversine_km(a.0, a.1, b.0, b.1);
                let k = thresholds.iter().position(|&t| d <= t).unwrap_or(thresholds.len() - 1);
                scales.insert(k + 1);
            }
        }
        if scales.is_empty() {
            continue;
        }
        let label: String = scales.iter().map(|k| k.to_string()).collect();
        let entry = out.entry(label).or_default();
        entry.0 += 1;
        entry.1 += locs.len();
    }
    out
}

/// Block matrix whose cross-block entries all share one value drawn from
/// `across`.
pub fn block_matrix_shared_cross<R: rand::Rng>(
    n: usize,
    edges: &[usize],
    within: std::ops::Range<f64>,
    across: std::ops::Range<f64>,
    rng: &mut R,
) -> Vec<f64> {
    let block = |s: usize| edges.iter().filter(|&&e| s >= e).count();
    let c = rng.random_range(across);
    let mut m = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if block(i) == block(j) { rng.random_range(within.clone()) } else { c };
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}
