use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use natscale::geometry::{majority_smooth, VoronoiDiagram};
use natscale::scalespace::SeparationOptions;
use natscale::{
    best_louvain, detect_breakpoints, percentile_graph, rand_similarity, similarity_matrix,
    Partition, ScaleIndex,
};
use natscale_bench::{random_labelings, random_points, two_level_graph};

fn bench_louvain(c: &mut Criterion) {
    let fx = two_level_graph(1);
    let mut group = c.benchmark_group("louvain");
    group.sample_size(10);
    for s in [10, 50, 100] {
        let g = percentile_graph(&fx.graph, &fx.table, ScaleIndex::new(s).unwrap());
        group.bench_function(format!("best of 100, scale {s}"), |b| {
            b.iter(|| best_louvain(black_box(&g), 100, 7).unwrap())
        });
    }
    group.finish();
}

fn bench_similarity(c: &mut Criterion) {
    let parts: Vec<Partition> = random_labelings(2, 100, 200, 12)
        .iter()
        .map(|l| Partition::from_labels(l))
        .collect();
    c.bench_function("rand similarity, 200 locations", |b| {
        b.iter(|| rand_similarity(black_box(&parts[0]), black_box(&parts[1])).unwrap())
    });
    c.bench_function("similarity matrix, 100 x 200", |b| {
        b.iter(|| similarity_matrix(black_box(&parts)).unwrap())
    });
    let m = similarity_matrix(&parts).unwrap();
    c.bench_function("greedy breakpoints, 100 scales", |b| {
        b.iter(|| detect_breakpoints(black_box(&m), 5, SeparationOptions::default()).unwrap())
    });
}

fn bench_voronoi(c: &mut Criterion) {
    let mut group = c.benchmark_group("voronoi");
    for n in [200, 1000, 5000] {
        let seeds = random_points(3, n, 100.0);
        group.bench_function(format!("{n} seeds"), |b| {
            b.iter_batched(
                || seeds.clone(),
                |s| VoronoiDiagram::planar(s, 0.05).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    let d = VoronoiDiagram::planar(random_points(3, 1000, 100.0), 0.05).unwrap();
    let probes = random_points(4, 10_000, 100.0);
    group.bench_function("locate 10k points, 1000 seeds", |b| {
        b.iter(|| probes.iter().filter_map(|&p| d.locate(p)).count())
    });
    let labels = random_labelings(5, 1, 1000, 4).remove(0);
    group.bench_function("majority smoothing, 1000 cells", |b| {
        b.iter(|| majority_smooth(black_box(&labels), d.adjacency(), 100))
    });
    group.finish();
}

criterion_group!(benches, bench_louvain, bench_similarity, bench_voronoi);
criterion_main!(benches);
