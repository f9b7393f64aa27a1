use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use saas_tco::costing::cohort_aggregate;
use saas_tco::pricing::sensitivity;
use saas_tco::{CohortSchedule, Convention};
use saas_tco_bench::migration_scenario;

fn evaluate(c: &mut Criterion) {
    let scenario = migration_scenario();
    c.bench_function("evaluate_migration", |b| {
        b.iter(|| black_box(&scenario).evaluate().unwrap())
    });
}

fn cohorts(c: &mut Criterion) {
    let horizon = 40;
    let schedule = CohortSchedule::uniform(250, horizon, Convention::MidYear);
    let profile: Vec<f64> = (1..=horizon).map(|a| 10.0 * f64::from(a)).collect();
    c.bench_function("cohort_aggregate_40y", |b| {
        b.iter(|| cohort_aggregate(black_box(&profile), black_box(&schedule), horizon).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let scenario = migration_scenario();
    let grid: Vec<f64> = (1..=64).map(|i| f64::from(i) / 16.0).collect();
    c.bench_function("sensitivity_usage_64", |b| {
        b.iter(|| sensitivity(black_box(&scenario), "usage_multiplier", &grid).unwrap())
    });
}

criterion_group!(benches, evaluate, cohorts, sweep);
criterion_main!(benches);
