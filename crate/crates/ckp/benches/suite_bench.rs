//! Throughput comparison for the verification sweep: the data-parallel
//! path (rayon feature, default) versus the same build pinned to a
//! single rayon thread, which matches the sequential fallback's work.
//!
//! Run `cargo bench` for the parallel numbers and
//! `cargo bench --no-default-features` for the sequential path.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use ckp::harness::suite::{run_suite, SuiteConfig};
use ckp::linearize::{dominated, maximize_r};
use ckp::measure::{Density, Order, Space};
use ckp::transport::wasserstein;

fn sweep_config(seeds: u64) -> SuiteConfig {
    SuiteConfig {
        seed_count: seeds,
        n_max: 8,
        embed_failures: false,
        ..SuiteConfig::default()
    }
}

fn bench_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_sweep");
    group.sample_size(10);
    group.bench_function("seeds_32", |b| {
        b.iter(|| run_suite(&sweep_config(32)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("seeds_32_single_thread", |b| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        b.iter(|| pool.install(|| run_suite(&sweep_config(32)).unwrap()))
    });
    group.finish();
}

fn bench_kernels(c: &mut Criterion) {
    let n = 64;
    let space = Space::uniform(n).unwrap();
    let g: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let g = ckp::measure::RealFunction::new(g).unwrap();
    let order = Order::new(1.7).unwrap();
    c.bench_function("domination_certificate_n64", |b| {
        b.iter(|| dominated(&space, &g, order).unwrap())
    });
    c.bench_function("projected_ascent_n64", |b| {
        b.iter(|| maximize_r(&space, &g, order).unwrap())
    });

    let m = 24;
    let space = Space::uniform(m).unwrap();
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|i| (((i * 17) % m) as f64 / m as f64, (i as f64) / m as f64))
        .collect();
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .collect()
        })
        .collect();
    let ms = ckp::transport::MetricSpace::new(space.clone(), dist, 0).unwrap();
    let masses: Vec<f64> = (0..m).map(|i| 1.0 + ((i * 13) % 7) as f64).collect();
    let f = Density::from_masses(&space, &masses).unwrap();
    c.bench_function("wasserstein_n24", |b| {
        b.iter_batched(
            || (f.clone(), 1.5),
            |(f, p)| wasserstein(&ms, &f, p).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_suite, bench_kernels);
criterion_main!(benches);
