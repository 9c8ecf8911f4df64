use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use utm_heat::{synthesize_interval_control, terminal_profile, IntervalProblem, Regularization, SignalForm, TimeSignal};
use utm_heat_bench::sine_mode;

fn bench_synthesis(c: &mut Criterion) {
    let u0 = sine_mode().unwrap();
    let mut group = c.benchmark_group("interval");
    group.sample_size(10);
    let h = TimeSignal::closed_form(0.5, SignalForm::Sine { amp: 1.0, omega: 3.0 }).unwrap();
    let problem = IntervalProblem::new(u0.clone(), h).unwrap();
    let grid: Vec<f64> = (1..64).map(|j| j as f64 / 64.0).collect();
    group.bench_function("terminal profile on 63 points", |b| b.iter(|| terminal_profile(&problem, black_box(&grid)).unwrap()));
    group.bench_function("control synthesis (K = 8)", |b| {
        b.iter(|| synthesize_interval_control(&u0, 0.5, black_box(8), Regularization::Relative(1e-10)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_synthesis);
criterion_main!(benches);
