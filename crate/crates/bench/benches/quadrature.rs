use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tailward_bench::operand_pairs;
use tailward_core::laplace_kernel::{integral_i_numeric, watson_numeric, KernelParams};
use tailward_core::oracle::{sf_product_exact, sf_sum_exact};
use tailward_core::quadrature::{integrate_log, QuadOptions};

fn raw(c: &mut Criterion) {
    let opts = QuadOptions::default();
    c.bench_function("gaussian_log_integral", |b| {
        b.iter(|| integrate_log(|x| -0.5 * x * x, black_box(-f64::INFINITY), f64::INFINITY, &opts).unwrap())
    });
    c.bench_function("pareto_tail_integral", |b| {
        b.iter(|| integrate_log(|x| -1.5 * x.ln(), black_box(1.0), f64::INFINITY, &opts).unwrap())
    });
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_sf");
    for (name, x, y) in operand_pairs() {
        let u = if name.contains('*') { 20.0 } else { 10.0 };
        let f = if name.contains('*') { sf_product_exact } else { sf_sum_exact };
        group.bench_with_input(BenchmarkId::from_parameter(name), &u, |b, &u| b.iter(|| f(&x, &y, black_box(u)).unwrap()));
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let p = KernelParams::new(2.0, 1.0, 1.5, 1.0).unwrap();
    c.bench_function("laplace_kernel_u20", |b| b.iter(|| integral_i_numeric(black_box(20.0), &p, 1.0).unwrap()));
    c.bench_function("watson_u100", |b| b.iter(|| watson_numeric(black_box(100.0), 1.5, 1.0).unwrap()));
}

criterion_group!(benches, raw, oracles, kernels);
criterion_main!(benches);
