use criterion::{criterion_group, criterion_main, Criterion};
use metasoc_core::sim::{run_adoption, run_sandpile, AdoptionConfig, SandpileConfig, Topology};
use std::hint::black_box;

fn bench_sim(c: &mut Criterion) {
    let pile = SandpileConfig::new(50, 50, 20_000, 1);
    c.bench_function("sandpile_50x50_20k", |b| b.iter(|| run_sandpile(black_box(&pile)).unwrap()));

    let adoption = AdoptionConfig {
        topology: Topology::SmallWorld { neighbors: 6, rewire: 0.1 },
        n_nodes: 200,
        threshold_fraction: 0.25,
        innovation_rate: 0.01,
        steps: 500,
        seed: 1,
    };
    c.bench_function("adoption_small_world_200", |b| b.iter(|| run_adoption(black_box(&adoption)).unwrap()));
}

criterion_group!(benches, bench_sim);
criterion_main!(benches);
