use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mopbd::costvec::{nd_filter_kung_2d, nd_filter_naive, CostVec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_vectors(n: usize, seed: u64) -> Vec<CostVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| CostVec::from_finite(&[rng.random_range(0..1000), rng.random_range(0..1000)]))
        .collect()
}

fn nd_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("nd_filter");
    for &n in &[16usize, 64, 256, 1024] {
        let input = random_vectors(n, n as u64);
        group.bench_with_input(BenchmarkId::new("naive", n), &input, |b, input| {
            b.iter(|| nd_filter_naive(black_box(input)))
        });
        group.bench_with_input(BenchmarkId::new("kung_2d", n), &input, |b, input| {
            b.iter(|| nd_filter_kung_2d(black_box(input)))
        });
    }
    group.finish();
}

criterion_group!(benches, nd_kernels);
criterion_main!(benches);
