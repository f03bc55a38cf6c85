use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use growthclass::associated::{recover_sequence, AssociatedWeight, EvalMode};
use growthclass::relations::bridge_triangle_seq;
use growthclass::suites::random_sequences;
use growthclass::{Grid, GridSpec, Policy, ThetaFunction, ThetaKind, WeightSequence};

fn omega(c: &mut Criterion) {
    let g = Grid::geometric(&GridSpec::default());
    let w = AssociatedWeight::new(WeightSequence::gevrey(1.5, 512));
    assert_eq!(w.mode(), EvalMode::ClosedForm);
    c.bench_function("omega closed form, 4096 points", |b| {
        b.iter(|| {
            g.log_points()
                .iter()
                .map(|&s| w.omega_closed(black_box(s)))
                .sum::<f64>()
        })
    });
    c.bench_function("omega sup scan, 4096 points", |b| {
        b.iter(|| {
            g.log_points()
                .iter()
                .map(|&s| w.omega_sup_scan(black_box(s)))
                .sum::<f64>()
        })
    });
    let p = Policy::default();
    c.bench_function("legendre recovery J = 512", |b| {
        b.iter(|| recover_sequence(black_box(&w), &g, &p))
    });
}

fn minorant(c: &mut Criterion) {
    let seqs = random_sequences(16, 512, 7);
    c.bench_function("log-convex minorant J = 512", |b| {
        b.iter(|| {
            seqs.iter()
                .map(|m| m.log_convex_minorant().log(256))
                .sum::<f64>()
        })
    });
}

fn theta(c: &mut Criterion) {
    let th = ThetaFunction::new(WeightSequence::q_gevrey(1.5, 512), ThetaKind::Pow(2)).unwrap();
    c.bench_function("theta eval", |b| {
        b.iter(|| th.eval(black_box(1e3)).unwrap())
    });
}

fn bridge(c: &mut Criterion) {
    let g = Grid::geometric(&GridSpec::default());
    let p = Policy::default();
    let (m, n) = (
        WeightSequence::gevrey(1.0, 512),
        WeightSequence::gevrey(2.0, 512),
    );
    let mut group = c.benchmark_group("relations");
    group.sample_size(10);
    group.bench_function("bridge_triangle_seq", |b| {
        b.iter(|| bridge_triangle_seq(&m, &n, &g, &p))
    });
    group.finish();
}

criterion_group!(benches, omega, minorant, theta, bridge);
criterion_main!(benches);
