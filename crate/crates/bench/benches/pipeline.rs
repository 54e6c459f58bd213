use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hnd_bench::{fixture, model};
use hnd_core::{betweenness, dismantle, generate, predict, HyperFFParams, Scorer};

fn scoring(c: &mut Criterion) {
    let params = model();
    let mut group = c.benchmark_group("scoring");
    group.sample_size(10);
    for n in [250, 500, 1000] {
        let g = fixture(n);
        group.bench_with_input(BenchmarkId::new("hnd", n), &g, |b, g| {
            b.iter(|| predict(black_box(g), &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("betweenness", n), &g, |b, g| {
            b.iter(|| betweenness(&black_box(g).two_section()))
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    c.bench_function("generate_500", |b| {
        b.iter(|| generate(black_box(&HyperFFParams::new(500, 0.3, 0.3, 1))).unwrap())
    });
}

fn dismantling(c: &mut Criterion) {
    let g = fixture(200);
    let mut group = c.benchmark_group("dismantle_200");
    group.sample_size(10);
    group.bench_function("hda", |b| b.iter(|| dismantle(&g, &Scorer::Hda, 0.01, 0.0).unwrap()));
    group.bench_function("hnd", |b| {
        let scorer = Scorer::hnd(model());
        b.iter(|| dismantle(&g, &scorer, 0.01, 0.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, scoring, generation, dismantling);
criterion_main!(benches);
