use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fillrad_core::persistence::{
    build_vr_filtration, estimate_fillrad, reduce, reduce_naive, EstimatorConfig,
};
use fillrad_core::samplers::{sample_circle, sample_sphere};

fn filtration(c: &mut Criterion) {
    let circle = sample_circle(std::f64::consts::TAU, 128).unwrap();
    c.bench_function("vr_filtration/circle128_maxdim2", |b| {
        b.iter(|| build_vr_filtration(black_box(&circle.space), 2, 2.31).unwrap())
    });
}

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce");
    for n in [40usize, 60, 80] {
        let sphere = sample_sphere(2, n, 0).unwrap();
        let f = build_vr_filtration(&sphere.space, 3, 2.2).unwrap();
        group.bench_with_input(BenchmarkId::new("sphere2_maxdim3", n), &f, |b, f| {
            b.iter(|| reduce(black_box(f)))
        });
    }
    let small = sample_sphere(2, 14, 0).unwrap();
    let f = build_vr_filtration(&small.space, 3, 2.2).unwrap();
    group.bench_function("naive/sphere2_14", |b| {
        b.iter(|| reduce_naive(black_box(&f)))
    });
    group.bench_function("clearing/sphere2_14", |b| b.iter(|| reduce(black_box(&f))));
    group.finish();
}

fn estimator(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_fillrad");
    group.sample_size(10);
    let circle = sample_circle(std::f64::consts::TAU, 128).unwrap();
    group.bench_function("circle128_k1", |b| {
        b.iter(|| estimate_fillrad(black_box(&circle), 1, &EstimatorConfig::default()).unwrap())
    });
    let sphere = sample_sphere(2, 80, 0).unwrap();
    group.bench_function("sphere2_80_k2", |b| {
        b.iter(|| estimate_fillrad(black_box(&sphere), 2, &EstimatorConfig::default()))
    });
    group.finish();
}

criterion_group!(benches, filtration, reduction, estimator);
criterion_main!(benches);
