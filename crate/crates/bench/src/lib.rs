//! Fixtures shared by the benchmarks.

use natscale::ingest::ActivityMeasure;
use natscale::synth::Level;
use natscale::{
    assign_events, build_graph, filter_min_degree, generate_synthetic, percentile_table, GeoPoint,
    LocationRegistry, PercentileMode, PercentileTable, SyntheticSpec, WeightedGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Filtered co-location graph of a two-level synthetic data set.
pub struct GraphFixture {
    pub registry: LocationRegistry,
    pub graph: WeightedGraph,
    pub table: PercentileTable,
}

pub fn two_level_graph(seed: u64) -> GraphFixture {
    let spec = SyntheticSpec {
        levels: vec![
            Level { radius_km: 5.0, clusters: 3 },
            Level { radius_km: 80.0, clusters: 4 },
        ],
        users: 500,
        movements_per_user: 10,
        mixing: vec![0.7, 0.3],
        locations: 200,
        center: GeoPoint::new(50.5, 4.5),
        rng_seed: seed,
    };
    let data = generate_synthetic(&spec).expect("valid spec");
    let assigned = assign_events(&data.events, &data.registry).expect("non-empty registry");
    let graph = build_graph(&assigned, &data.registry).expect("events present");
    let f = filter_min_degree(&graph, &data.registry, &assigned, 5, ActivityMeasure::DistinctUsers)
        .expect("enough active locations");
    let table = percentile_table(&f.graph, PercentileMode::ByWeight).expect("graph has edges");
    GraphFixture {
        registry: f.registry,
        graph: f.graph,
        table,
    }
}

/// `count` labelings of `n` items with up to `k` labels each.
pub fn random_labelings(seed: u64, count: usize, n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(0..k)).collect())
        .collect()
}

/// Uniform points in a `extent` x `extent` square.
pub fn random_points(seed: u64, n: usize, extent: f64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.random_range(0.0..extent), rng.random_range(0.0..extent)])
        .collect()
}
