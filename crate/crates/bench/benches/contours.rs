use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use utm_heat::{build_contour, contour_integrate, ContourKind, C64};

fn bench_contours(c: &mut Criterion) {
    let mut group = c.benchmark_group("contour");
    group.bench_function("build D+ (40 panels)", |b| {
        b.iter(|| build_contour(ContourKind::DPlus, black_box(std::f64::consts::PI / 8.0), 40.0, 40, 0.0).unwrap())
    });
    let plus = build_contour(ContourKind::DPlus, std::f64::consts::PI / 8.0, 40.0, 40, 0.0).unwrap();
    let (x, t) = (1.0, 0.5);
    group.bench_function("integrate e^{iλx-λ²t}/λ", |b| {
        b.iter(|| contour_integrate(&plus, |l: C64| (C64::i() * l * black_box(x) - l * l * black_box(t)).exp() / l).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_contours);
criterion_main!(benches);
