//! Parallel vs sequential timings for the three fan-out entry points.
//! The work per item differs by orders of magnitude between them, so the
//! comparison shows where the thread-pool pays off and where it does not.

use criterion::{criterion_group, criterion_main, Criterion};

use zc_timing::{
    coprime_roots, rank_roots, rank_roots_seq, run_experiment, run_experiment_seq,
    timing_distribution, timing_distribution_seq, DetectionScenario, KappaMode, SimulationConfig,
};

fn bench_timing_distribution(c: &mut Criterion) {
    let scenario = DetectionScenario::from_snr_db(839, 140, 8, 0.5, -5.0).unwrap();
    let mut g = c.benchmark_group("timing_distribution");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| timing_distribution(&scenario).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| timing_distribution_seq(&scenario).unwrap())
    });
    g.finish();
}

fn bench_run_experiment(c: &mut Criterion) {
    let scenario = DetectionScenario::from_snr_db(839, 140, 16, 0.5, -15.0).unwrap();
    let config = SimulationConfig::new(scenario, 15, 2_000, 7, KappaMode::Uniform).unwrap();
    let mut g = c.benchmark_group("run_experiment");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| run_experiment(&config).unwrap()));
    g.bench_function("sequential", |b| {
        b.iter(|| run_experiment_seq(&config).unwrap())
    });
    g.finish();
}

fn bench_rank_roots(c: &mut Criterion) {
    let candidates = coprime_roots(839);
    let mut g = c.benchmark_group("rank_roots");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| rank_roots(839, 256, &candidates, 1.5).unwrap())
    });
    g.bench_function("sequential", |b| {
        b.iter(|| rank_roots_seq(839, 256, &candidates, 1.5).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_timing_distribution,
    bench_run_experiment,
    bench_rank_roots
);
criterion_main!(benches);
