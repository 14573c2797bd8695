use rayon::prelude::*;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::PercentileMode;

/// Number of unordered pairs classified the same way by `p` and `q`
/// (together in both or apart in both) and the total number of pairs.
pub fn pair_agreements(p: &Partition, q: &Partition) -> Result<(u64, u64)> {
    if p.len() != q.len() {
        return Err(Error::GroundSetMismatch(p.len(), q.len()));
    }
    let n = p.len() as u64;
    if n < 2 {
        return Err(Error::Input("similarity needs at least two locations".into()));
    }
    let (kp, kq) = (p.n_communities(), q.n_communities());
    let mut table = vec![0u64; kp * kq];
    let mut rows = vec![0u64; kp];
    let mut cols = vec![0u64; kq];
    for (&a, &b) in p.labels().iter().zip(q.labels()) {
        table[a as usize * kq + b as usize] += 1;
        rows[a as usize] += 1;
        cols[b as usize] += 1;
    }
    let pairs = |c: &u64| c * c.saturating_sub(1) / 2;
    let both: u64 = table.iter().map(pairs).sum();
    let in_p: u64 = rows.iter().map(pairs).sum();
    let in_q: u64 = cols.iter().map(pairs).sum();
    let total = n * (n - 1) / 2;
    Ok((total + 2 * both - in_p - in_q, total))
}

/// Rand index: fraction of location pairs on which the two partitions agree.
pub fn rand_similarity(p: &Partition, q: &Partition) -> Result<f64> {
    let (agree, total) = pair_agreements(p, q)?;
    Ok(agree as f64 / total as f64)
}

/// Symmetric matrix of pairwise partition similarities. Rows and columns are
/// indexed by scale minus one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    /// Percentile mode of the graphs the partitions came from.
    pub weighting: Option<PercentileMode>,
}

impl SimilarityMatrix {
    /// Matrix from row-major values. Checks shape, symmetry, unit diagonal
    /// and range.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Input(format!("expected {} values, got {}", n * n, values.len())));
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::Input(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) || v != values[j * n + i] {
                    return Err(Error::Input(format!("entry ({i}, {j}) is invalid or asymmetric")));
                }
            }
        }
        Ok(Self {
            n,
            values,
            weighting: None,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Similarity between scales `i + 1` and `j + 1`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Plain `n x n` CSV without header.
    pub fn to_csv(&self) -> String {
        matrix_csv(self.n, |i, j| self.get(i, j))
    }

    /// `1 - similarity`, min-max normalised to `[0, 1]` over the matrix.
    pub fn normalized_dissimilarity(&self) -> Vec<f64> {
        let d: Vec<f64> = self.values.iter().map(|v| 1.0 - v).collect();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            d.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![0.0; d.len()]
        }
    }

    pub fn normalized_dissimilarity_csv(&self) -> String {
        let d = self.normalized_dissimilarity();
        matrix_csv(self.n, |i, j| d[i * self.n + j])
    }
}

fn matrix_csv(n: usize, value: impl Fn(usize, usize) -> f64) -> String {
    let mut out = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| value(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Pairwise Rand similarities of `partitions`, computed once per unordered
/// pair.
pub fn similarity_matrix(partitions: &[Partition]) -> Result<SimilarityMatrix> {
    let n = partitions.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let sims: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| rand_similarity(&partitions[i], &partitions[j]))
        .collect::<Result<_>>()?;
    let mut values = vec![1.0; n * n];
    for (&(i, j), &s) in pairs.iter().zip(&sims) {
        values[i * n + j] = s;
        values[j * n + i] = s;
    }
    Ok(SimilarityMatrix {
        n,
        values,
        weighting: None,
    })
}
