use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ness_bench::{bias, impurity, symmetric_state};
use ness_core::asymptotics::{q_n, vn_mi_asym};
use ness_core::correlation::{build_corr_matrix, Mode};
use ness_core::fisher_hartwig::{fh_logdet_asym, mi_symbol, FhOptions, JumpWindows};
use ness_core::measures::{fermionic_negativity, mutual_information_joint, renyi_negativity_det, EntropyOrder};
use ness_core::model::{Geometry, Subsystem};

fn correlations(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlations");
    group.sample_size(10);
    let (model, bias) = (impurity(), bias());
    for len in [64, 128] {
        let g = Geometry::symmetric(len, 1000).unwrap();
        group.bench_with_input(BenchmarkId::new("longrange", len), &g, |b, g| {
            b.iter(|| build_corr_matrix(&model, &bias, black_box(g), Subsystem::Both, Mode::Longrange))
        });
    }
    let near = Geometry::new(1, 5, 32, 5, 32).unwrap();
    group.bench_function("full/32", |b| b.iter(|| build_corr_matrix(&model, &bias, black_box(&near), Subsystem::Both, Mode::Full)));
    group.finish();
}

fn measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("measures");
    group.sample_size(10);
    for len in [32, 64] {
        let state = symmetric_state(len);
        group.bench_with_input(BenchmarkId::new("mutual_information", len), &state, |b, s| {
            b.iter(|| mutual_information_joint(black_box(s), EntropyOrder::VonNeumann))
        });
        group.bench_with_input(BenchmarkId::new("fermionic_negativity", len), &state, |b, s| {
            b.iter(|| fermionic_negativity(black_box(s)))
        });
        group.bench_with_input(BenchmarkId::new("renyi_negativity_det_4", len), &state, |b, s| {
            b.iter(|| renyi_negativity_det(black_box(s), 4))
        });
    }
    group.finish();
}

fn asymptotics(c: &mut Criterion) {
    let mut group = c.benchmark_group("asymptotics");
    group.bench_function("q_n", |b| b.iter(|| q_n(black_box(0.3), 2.5)));
    let g = Geometry::new(0, 3000, 100, 3040, 200).unwrap();
    let (model, bias) = (impurity(), bias());
    group.bench_function("vn_mi_asym", |b| b.iter(|| vn_mi_asym(&model, &bias, black_box(&g))));
    let windows = JumpWindows::new((0.2, 0.6), (0.1, 0.8)).unwrap();
    let symbol = mi_symbol(Subsystem::Both, 0.5, 2, &windows, 0.3).unwrap();
    group.bench_function("fh_logdet_asym", |b| b.iter(|| fh_logdet_asym(black_box(&symbol), 1024, FhOptions::default())));
    group.finish();
}

criterion_group!(benches, correlations, measures, asymptotics);
criterion_main!(benches);
