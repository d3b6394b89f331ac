use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ptl_core::sieve;
use ptl_core::Limits;

fn bench_prime_count(c: &mut Criterion) {
    let limits = Limits::default();
    let mut group = c.benchmark_group("prime_count");
    group.sample_size(20);
    for &x in &[1_000_000u64, 10_000_000, 100_000_000] {
        group.bench_function(format!("pi({x})"), |b| {
            b.iter(|| sieve::prime_count(black_box(x), &limits).unwrap())
        });
    }
    group.finish();
}

fn bench_twin_count(c: &mut Criterion) {
    let limits = Limits::default();
    let mut group = c.benchmark_group("twin_count");
    group.sample_size(20);
    group.bench_function("pi2(10^7)", |b| {
        b.iter(|| sieve::twin_count(black_box(10_000_000), &limits).unwrap())
    });
    group.finish();
}

fn bench_high_segment(c: &mut Criterion) {
    let limits = Limits::default();
    c.bench_function("sieve_range at 10^9", |b| {
        b.iter(|| sieve::sieve_range(1_000_000_000, 1_000_100_000, &limits).unwrap())
    });
}

fn bench_segment_sizes(c: &mut Criterion) {
    let mut group = c.benchmark_group("segment_size");
    group.sample_size(20);
    for &size in &[1u64 << 16, 1 << 20, 1 << 22] {
        let limits = Limits {
            segment_size: size,
            ..Limits::default()
        };
        group.bench_function(format!("pi(10^7) seg {size}"), |b| {
            b.iter(|| sieve::prime_count(black_box(10_000_000), &limits).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_prime_count,
    bench_twin_count,
    bench_high_segment,
    bench_segment_sizes
);
criterion_main!(benches);
