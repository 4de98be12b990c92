use std::hint::black_box;

use chiralwalk_bench::{small_corpus, worked_example, worked_example_mko};
use chiralwalk_core::numerics::{kernel_witness, residual_checks, residual_checks_mko};
use chiralwalk_core::{build_u_m, index_via_symbols, sigma_ess};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn index(c: &mut Criterion) {
    let mut group = c.benchmark_group("index_via_symbols");
    for m in [1, 3] {
        let params = worked_example(m, 0.4);
        group.bench_with_input(BenchmarkId::from_parameter(m), &params, |b, p| {
            b.iter(|| index_via_symbols(black_box(p)).unwrap())
        });
    }
    group.finish();
    let corpus = small_corpus(32);
    c.bench_function("index_via_symbols/corpus32", |b| {
        b.iter(|| {
            for p in &corpus {
                black_box(index_via_symbols(p).unwrap());
            }
        })
    });
}

fn spectrum(c: &mut Criterion) {
    let params = worked_example(1, 0.4);
    let mut group = c.benchmark_group("sigma_ess");
    for res in [256, 2048] {
        group.bench_with_input(BenchmarkId::from_parameter(res), &res, |b, &r| {
            b.iter(|| sigma_ess(black_box(&params), r).unwrap())
        });
    }
    group.finish();
}

fn numerics(c: &mut Criterion) {
    let params = worked_example(1, 0.4);
    let mut group = c.benchmark_group("numerics");
    group.sample_size(10);
    group.bench_function("finite_section/N100", |b| {
        let u = build_u_m(&params);
        b.iter(|| u.finite_section(black_box(100)).unwrap())
    });
    group.bench_function("residual_checks/N100", |b| {
        b.iter(|| residual_checks(black_box(&params), 100, 1e-10).unwrap())
    });
    group.bench_function("residual_checks_mko/N100", |b| {
        let mko = worked_example_mko();
        b.iter(|| residual_checks_mko(black_box(&mko), 100, 1e-10).unwrap())
    });
    group.bench_function("kernel_witness/N100", |b| {
        b.iter(|| kernel_witness(black_box(&params), 100, 1e-6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, index, spectrum, numerics);
criterion_main!(benches);
