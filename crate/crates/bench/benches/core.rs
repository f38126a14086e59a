use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pauli_dyn_core::families::cosine_flip;
use pauli_dyn_core::generator::{decay_rates, is_cp_divisible, singular_points};
use pauli_dyn_core::mixing::{verify_lemma1, Lemma1Config};
use pauli_dyn_core::numerics::{find_roots, TimeFunction};
use pauli_dyn_core::scenarios::example1;
use pauli_dyn_core::sim::{evolve, Excision};
use pauli_dyn_core::{Axis, BlochState};

fn roots(c: &mut Criterion) {
    let f = TimeFunction::new(|t: f64| t.cos().powi(2));
    c.bench_function("find_roots cos^2 on [0, 20]", |b| {
        b.iter(|| find_roots(black_box(&f), 0.0, 20.0, 81_920, 1e-9))
    });
}

fn singularities(c: &mut Criterion) {
    let m = example1(1.0, 1.0, 10.0).unwrap();
    c.bench_function("singular_points example 1", |b| {
        b.iter(|| singular_points(black_box(&m.channel), 10.0))
    });
    c.bench_function("is_cp_divisible example 1", |b| {
        b.iter(|| is_cp_divisible(black_box(&m.channel), 10.0, 4001))
    });
}

fn lemma(c: &mut Criterion) {
    let cfg = Lemma1Config::new(200, 10.0, 42);
    c.bench_function("verify_lemma1 200 trials", |b| {
        b.iter(|| verify_lemma1(black_box(&cfg)).unwrap())
    });
}

fn integrate(c: &mut Criterion) {
    let ch = cosine_flip(Axis::X, 1.0).unwrap();
    let rates = decay_rates(&ch, 1.4);
    c.bench_function("evolve cosine flip dt 1e-3", |b| {
        b.iter(|| {
            evolve(
                &rates,
                BlochState::axis(Axis::Y),
                1.4,
                black_box(1e-3),
                Excision::Forbid,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, roots, singularities, lemma, integrate);
criterion_main!(benches);
