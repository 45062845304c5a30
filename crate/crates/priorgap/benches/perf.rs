//! Criterion benchmarks: scheduling modes of the sweep harness against each
//! other, the two oracle forms, and the bound engine on each worked model.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use priorgap::dist::Distribution;
use priorgap::models::{
    BinomialSuccessCase, ModelCase, NormalVarianceCase, PoissonRateCase,
};
use priorgap::numerics::QuadratureSettings;
use priorgap::sweep::{run_sweep_mode, ExecMode, SweepModel, SweepPlan};
use priorgap::wasserstein::{w1_crosscheck, w1_distance, OracleSettings};

fn small_poisson_plan() -> SweepPlan {
    let mut plan = SweepPlan::new(
        SweepModel::PoissonRate {
            alpha1: 0.5,
            beta1: 0.0,
            alpha2: 0.5,
            beta2: 1.0,
        },
        vec![10, 32, 100, 316],
        2.0,
        42,
    );
    plan.replicates = 2;
    plan
}

fn bench_sweep_modes(c: &mut Criterion) {
    let plan = small_poisson_plan();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("serial", |b| {
        b.iter(|| black_box(run_sweep_mode(&plan, ExecMode::Serial).unwrap()))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_sweep_mode(&plan, ExecMode::Parallel).unwrap()))
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let p = Distribution::gamma(7.0, 5.0).unwrap();
    let q = Distribution::gamma(8.0, 6.0).unwrap();
    let settings = OracleSettings::default();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    group.bench_function("cdf_integral", |b| {
        b.iter(|| black_box(w1_distance(&p, &q, &settings).unwrap()))
    });
    group.bench_function("both_forms_crosschecked", |b| {
        b.iter(|| black_box(w1_crosscheck(&p, &q, &settings).unwrap()))
    });
    group.finish();
}

fn bench_engine_bounds(c: &mut Criterion) {
    let cases = [
        (
            "normal_variance",
            ModelCase::NormalVariance(NormalVarianceCase {
                n: 10,
                centered_sq_sum: 10.0,
                alpha: 1.0,
                beta: 1.0,
            }),
        ),
        (
            "binomial",
            ModelCase::BinomialSuccess(BinomialSuccessCase {
                n: 10,
                successes: 3,
                alpha: 2.0,
                beta: 2.0,
            }),
        ),
        (
            "poisson",
            ModelCase::PoissonRate(PoissonRateCase {
                n: 4,
                sum_x: 6,
                alpha1: 1.0,
                beta1: 1.0,
                alpha2: 2.0,
                beta2: 2.0,
            }),
        ),
    ];
    let quad = QuadratureSettings::default();
    let mut group = c.benchmark_group("engine_bounds");
    group.sample_size(20);
    for (name, case) in cases {
        let pair = case.nested_pair().unwrap();
        group.bench_function(name, |b| b.iter(|| black_box(pair.bounds(&quad).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_sweep_modes, bench_oracle, bench_engine_bounds);
criterion_main!(benches);
