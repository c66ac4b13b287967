use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use tailward_bench::operand_pairs;
use tailward_core::gp_extremes::FbmGenerator;
use tailward_core::montecarlo::{conditional_sf, estimate_sf, Combine};
use tailward_core::oracle::Op;
use tailward_core::rng::stream;

fn fbm(c: &mut Criterion) {
    let mut group = c.benchmark_group("fbm_path");
    for &(h, n) in &[(0.5, 1 << 14), (0.7, 1 << 12), (0.7, 1 << 14), (0.3, 1 << 14)] {
        let g = FbmGenerator::new(h, n, 1.0).unwrap();
        let mut path = vec![0.0; n + 1];
        let mut rng = stream(1, 0);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new(format!("H={h}"), n), &n, |b, _| {
            b.iter(|| g.fill(&mut rng, black_box(&mut path)))
        });
    }
    group.finish();
}

fn running_sup(c: &mut Criterion) {
    let g = FbmGenerator::new(0.5, 1 << 16, 50.0).unwrap();
    let mut rng = stream(2, 0);
    c.bench_function("bm_running_sup_2^16", |b| b.iter(|| g.running_sup(&mut rng, black_box)));
}

fn monte_carlo(c: &mut Criterion) {
    let (_, x, y) = operand_pairs().swap_remove(0);
    let grid = [2.0, 4.0, 6.0];
    let mut group = c.benchmark_group("monte_carlo_1e4");
    group.sample_size(20);
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::new("direct", workers), &workers, |b, &w| {
            b.iter(|| estimate_sf(&x, Some(&y), &Combine::Sum, &grid, 10_000, 7, w).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("conditional", workers), &workers, |b, &w| {
            b.iter(|| conditional_sf(&x, &y, Op::Sum, &grid, 10_000, 7, w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fbm, running_sup, monte_carlo);
criterion_main!(benches);
