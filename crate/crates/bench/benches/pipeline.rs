use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use detmethod::engine::{self, DeltaSpec, PipelineConfig};
use detmethod::points::{enumerate_affine, HeightBox};
use detmethod::{GradedOrdering, GroebnerBasis};
use detmethod_bench::{parabola, twisted_cubic};

fn groebner(c: &mut Criterion) {
    let ideal = twisted_cubic();
    let mut group = c.benchmark_group("groebner");
    for cap in [8u32, 16] {
        group.bench_with_input(BenchmarkId::new("twisted_cubic", cap), &cap, |b, &cap| {
            b.iter(|| GroebnerBasis::compute(black_box(&ideal), GradedOrdering::GrlexLeft, Some(cap)).unwrap())
        });
    }
    group.finish();
}

fn points(c: &mut Criterion) {
    let ideal = parabola();
    c.bench_function("enumerate_parabola_1e6", |b| {
        b.iter(|| enumerate_affine(black_box(&ideal), 1e6, u128::MAX).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    let ideal = parabola();
    let cfg = PipelineConfig::new(DeltaSpec::Epsilon(0.25));
    for b in [1e2, 1e4] {
        group.bench_with_input(BenchmarkId::new("parabola", b), &b, |bench, &b| {
            bench.iter(|| engine::affine_pipeline(&ideal, b, &cfg).unwrap())
        });
    }
    let cubic = twisted_cubic();
    let heights = HeightBox::uniform(4, 27.0).unwrap();
    let cfg = PipelineConfig::new(DeltaSpec::Fixed(2));
    group.bench_function("twisted_cubic_27", |bench| {
        bench.iter(|| engine::cover_and_construct(&cubic, &heights, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, groebner, points, pipeline);
criterion_main!(benches);
