use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdnls::fft::FftNd;
use qdnls::norms::vp_variation_with;
use qdnls::resonance::{rational, scan_min_ratio};
use qdnls::{pointwise_product, Complex64, ProductKind};
use qdnls_bench::{field, lattice};
use std::hint::black_box;

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft");
    for (dim, n) in [(1, 4096), (2, 128), (3, 48)] {
        let plan = FftNd::new(n, dim);
        let mut data: Vec<Complex64> = (0..plan.len()).map(|i| Complex64::new(i as f64, 0.5)).collect();
        group.bench_with_input(BenchmarkId::new(format!("d{dim}"), n), &n, |b, _| {
            b.iter(|| {
                plan.forward(&mut data);
                plan.inverse(&mut data);
            })
        });
    }
    group.finish();
}

fn product(c: &mut Criterion) {
    let mut group = c.benchmark_group("pointwise_product");
    for (dim, k) in [(1, 256), (2, 32), (3, 8)] {
        let lat = lattice(dim, k);
        let f = field(&lat, 1, 1);
        let g = field(&lat, dim, 2);
        group.bench_function(BenchmarkId::new(format!("d{dim}"), k), |b| {
            b.iter(|| pointwise_product(black_box(&f), black_box(&g), true, ProductKind::Broadcast).unwrap())
        });
    }
    group.finish();
}

fn variation(c: &mut Criterion) {
    let mut group = c.benchmark_group("v2_dp");
    for n in [64usize, 256, 1024] {
        let path: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + (i as f64 * 0.011).cos()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| vp_variation_with(n, 2.0, |i, j| (path[i] - path[j]).abs()).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let sigmas = [rational(1, 1), rational(-2, 1), rational(-3, 1)];
    let mut group = c.benchmark_group("resonance_scan");
    group.sample_size(10);
    for k in [4usize, 8] {
        group.bench_with_input(BenchmarkId::new("d2", k), &k, |b, &k| {
            b.iter(|| scan_min_ratio(&sigmas, k, 2).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fft, product, variation, scan);
criterion_main!(benches);
