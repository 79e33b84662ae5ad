use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ness_bench::random_hermitian;
use ness_core::densela::{gen_eigvals, herm_eigvals, lu_logdet};

fn dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("densela");
    group.sample_size(10);
    for dim in [64, 128, 256] {
        let m = random_hermitian(dim, 7);
        group.bench_with_input(BenchmarkId::new("herm_eigvals", dim), &m, |b, m| b.iter(|| herm_eigvals(black_box(m))));
        group.bench_with_input(BenchmarkId::new("lu_logdet", dim), &m, |b, m| b.iter(|| lu_logdet(black_box(m))));
        group.bench_with_input(BenchmarkId::new("gen_eigvals", dim), &m, |b, m| b.iter(|| gen_eigvals(black_box(m))));
    }
    group.finish();
}

criterion_group!(benches, dense);
criterion_main!(benches);
