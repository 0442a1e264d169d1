//! Parallel vs sequential throughput on the two enumeration-heavy paths:
//! the full census of a degree and seeded sampling of the standardized
//! count. On a single hardware thread the parallel variants should sit
//! within a few percent of the sequential ones (rayon overhead only).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use omegak_core::dist::{empirical_cdf, empirical_cdf_sequential, Mode, Statistic};
use omegak_core::field::FieldContext;
use omegak_core::stats::{brute_census, brute_census_sequential};

fn bench_census(c: &mut Criterion) {
    let ctx = FieldContext::new(2, 1).unwrap();
    let mut group = c.benchmark_group("census");
    for n in [14usize, 18] {
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| brute_census_sequential(&ctx, n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| brute_census(&ctx, n).unwrap())
        });
    }
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let ctx = FieldContext::new(2, 1).unwrap();
    let mode = Mode::Sample { count: 20_000, seed: 1 };
    let mut group = c.benchmark_group("sampling");
    for n in [64usize, 128] {
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| empirical_cdf_sequential(&ctx, n, Statistic::Omega1, mode).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| empirical_cdf(&ctx, n, Statistic::Omega1, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_census, bench_sampling);
criterion_main!(benches);
