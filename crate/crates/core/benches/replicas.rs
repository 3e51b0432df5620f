//! Replica throughput: the rayon fan-out against the plain loop.

use std::hint::black_box;

use averaging::engine::run_at_root;
use averaging::{par, seed, ClockConfig, Graph, InitialLaw, LawKind, MuLaw};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn replicas(c: &mut Criterion) {
    let z2 = Graph::generate(&"lattice:d=2".parse().unwrap()).unwrap();
    let law = InitialLaw::new(LawKind::Gaussian { mean: 0.0, var: 1.0 }, 1).unwrap();
    let base = ClockConfig::new(1.0, MuLaw::Half, 1);
    let one = |i: usize, t: f64| {
        let cfg = base.with_seed(seed::derive(1, "bench", i as u64));
        run_at_root(&z2, &law, &cfg, t, z2.origin()).unwrap()
    };

    let mut group = c.benchmark_group("replicas_z2");
    group.sample_size(10);
    for t in [2.0, 4.0] {
        group.bench_with_input(BenchmarkId::new("parallel", t), &t, |b, &t| {
            b.iter(|| black_box(par::replicate(200, |i| one(i, t))))
        });
        group.bench_with_input(BenchmarkId::new("sequential", t), &t, |b, &t| {
            b.iter(|| black_box(par::replicate_sequential(200, |i| one(i, t))))
        });
    }
    group.finish();
}

criterion_group!(benches, replicas);
criterion_main!(benches);
