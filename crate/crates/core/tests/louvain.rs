mod oracles;

use natscale::graph::generators::{planted_partition, random_weighted};
use natscale::{best_louvain, force_bipartition, louvain, modularity, rand_similarity, Partition, WeightedGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn optimum(g: &WeightedGraph) -> f64 {
    oracles::set_partitions(g.vertex_count())
        .iter()
        .map(|l| oracles::modularity_pairwise(g, l))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn two_triangles_reach_the_exhaustive_optimum() {
    let g = WeightedGraph::from_pairs(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
    let best = optimum(&g);
    let p = best_louvain(&g, 10, 1).unwrap();
    assert!((p.quality.unwrap() - best).abs() < 1e-12);
    assert_eq!(oracles::canonical(p.labels()), vec![0, 0, 0, 1, 1, 1]);
}

#[test]
fn complete_graph_stays_whole() {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    let g = WeightedGraph::from_pairs(5, &pairs).unwrap();
    let p = best_louvain(&g, 10, 3).unwrap();
    assert_eq!(p.n_communities(), 1);
    assert!(p.quality.unwrap().abs() < 1e-12);
    assert!(optimum(&g) < 1e-12);
}

#[test]
fn small_random_graphs_never_beat_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut hits = 0;
    let mut total = 0;
    while total < 40 {
        let n = rng.random_range(3..=8);
        let g = random_weighted(n, 0.5, 4, &mut rng);
        if g.total_weight() == 0 {
            continue;
        }
        let best = optimum(&g);
        let q = best_louvain(&g, 20, total as u64).unwrap().quality.unwrap();
        assert!(q <= best + 1e-12);
        if q >= best - 1e-12 {
            hits += 1;
        }
        total += 1;
    }
    assert!(hits >= 36, "optimum found on {hits}/40 graphs");
}

#[test]
fn planted_partition_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (g, truth) = planted_partition(200, 4, 0.3, 0.01, &mut rng);
    let p = best_louvain(&g, 10, 5).unwrap();
    let r = rand_similarity(&p, &Partition::from_labels(&truth)).unwrap();
    assert!(r >= 0.95, "Rand {r}");
}

#[test]
fn seeded_runs_repeat() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let g = random_weighted(60, 0.1, 3, &mut rng);
    assert_eq!(louvain(&g, 7).unwrap(), louvain(&g, 7).unwrap());
    assert_eq!(best_louvain(&g, 8, 7).unwrap(), best_louvain(&g, 8, 7).unwrap());
}

#[test]
fn best_of_runs_is_the_maximum_of_single_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let g = random_weighted(40, 0.15, 3, &mut rng);
    let best = best_louvain(&g, 12, 100).unwrap();
    let singles: Vec<f64> = (1..=12).map(|r| louvain(&g, 100 + r).unwrap().quality.unwrap()).collect();
    let max = singles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(best.quality.unwrap(), max);
    let first = singles.iter().position(|&q| q == max).unwrap() as u64;
    assert_eq!(best, louvain(&g, 100 + first + 1).unwrap());
}

#[test]
fn isolated_vertices_keep_their_own_community() {
    let g = WeightedGraph::from_pairs(5, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let p = best_louvain(&g, 5, 1).unwrap();
    assert_eq!(oracles::canonical(p.labels()), vec![0, 0, 0, 1, 2]);
}

#[test]
fn bipartition_matches_exhaustive_grouping() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..100 {
        let n = rng.random_range(4..=14);
        let g = random_weighted(n, 0.4, 5, &mut rng);
        if g.total_weight() == 0 {
            continue;
        }
        let k = rng.random_range(2..=n.min(7) as u32);
        let mut labels: Vec<u32> = (0..n).map(|i| (i as u32) % k).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.random_range(0..=i));
        }
        let p = Partition::from_labels(&labels);
        let (q_ref, merged) = oracles::best_bipartition(&g, p.labels());
        let two = force_bipartition(&g, &p).unwrap();
        assert_eq!(two.n_communities(), 2);
        let q = modularity(&g, &two).unwrap();
        assert!((q - q_ref).abs() < 1e-12);
        assert_eq!(oracles::canonical(two.labels()), oracles::canonical(&merged));
    }
}

#[test]
fn bipartition_rejects_degenerate_input() {
    let g = WeightedGraph::from_pairs(3, &[(0, 1)]).unwrap();
    assert!(force_bipartition(&g, &Partition::uniform(3)).is_err());
    assert!(force_bipartition(&g, &Partition::singletons(4)).is_err());
    let many = Partition::singletons(30);
    let big = WeightedGraph::from_pairs(30, &[(0, 1)]).unwrap();
    assert!(force_bipartition(&big, &many).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn louvain_output_is_well_formed(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_weighted(n, 0.2, 4, &mut rng);
        prop_assume!(g.total_weight() > 0);
        let p = louvain(&g, seed).unwrap();
        prop_assert_eq!(p.len(), n);
        let dense = oracles::canonical(p.labels());
        prop_assert_eq!(p.labels(), &dense[..]);
        let q = modularity(&g, &p).unwrap();
        prop_assert_eq!(p.quality.unwrap(), q);
        prop_assert!(q >= -1e-12);
    }
}
