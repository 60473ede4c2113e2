use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use precess_core::observables::{make_clock_default, make_four_level, make_spin};
use precess_core::probspace::{Direction, QuantumBody};
use precess_core::protocol::{max_p3, ScoreOperators};
use precess_core::random::{random_state, rng_from_seed};
use precess_core::spectral::DEFAULT_ZERO_TOL;

fn scoring(c: &mut Criterion) {
    let four = make_four_level(1.0, 3.0).unwrap();
    c.bench_function("max_p3/four_level", |b| b.iter(|| max_p3(black_box(&four)).unwrap()));
    let clock = make_clock_default(60, 1.0).unwrap();
    c.bench_function("max_p3/clock60", |b| b.iter(|| max_p3(black_box(&clock)).unwrap()));

    let ops = ScoreOperators::new(&clock, DEFAULT_ZERO_TOL).unwrap();
    let state = random_state(clock.dim(), &mut rng_from_seed(1)).into();
    c.bench_function("score/clock60_pure", |b| b.iter(|| ops.score(black_box(&state)).unwrap()));
}

fn rays(c: &mut Criterion) {
    let body = QuantumBody::new(&make_spin(1.5).unwrap()).unwrap();
    let dir = Direction::from_angles(1.0, 0.3);
    body.ray_max(dir, 1e-6).unwrap();
    c.bench_function("ray_max/spin3_2", |b| b.iter(|| body.ray_max(black_box(dir), 1e-6).unwrap()));
    c.bench_function("support/spin3_2", |b| b.iter(|| body.support(black_box([0.3, -0.2, 0.9])).unwrap()));

    let mut group = c.benchmark_group("surface");
    group.sample_size(10);
    group.bench_function("spin3_2_500", |b| {
        b.iter(|| QuantumBody::new(&make_spin(1.5).unwrap()).unwrap().sample_surface(500, 0, 1e-6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, scoring, rays);
criterion_main!(benches);
