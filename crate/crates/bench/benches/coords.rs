use std::hint::black_box;

use bhmm::{membership_test, phi_bruteforce, recover_generic, CoordSystem, Distribution, Scalar, Tolerance};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coords(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("coords");
    for n in [4, 8] {
        let p = Distribution::new(n, CoordSystem::Probability, bhmm::random::simplex_point(&mut rng, n)).unwrap();
        let pf = p.map(Scalar::to_f64);
        group.bench_with_input(BenchmarkId::new("to_cumulant_exact", n), &p, |b, p| {
            b.iter(|| black_box(p).convert(CoordSystem::Cumulant, &tol).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("to_cumulant_f64", n), &pf, |b, p| {
            b.iter(|| black_box(p).convert(CoordSystem::Cumulant, &tol).unwrap())
        });
    }
    group.finish();
}

fn recovery(c: &mut Criterion) {
    let theta = bhmm::random::stochastic(&mut ChaCha8Rng::seed_from_u64(3));
    let tol = Tolerance::default();
    let p = phi_bruteforce(&theta, 4).unwrap();
    let m = p.prob_to_moment().unwrap();
    c.bench_function("recover_generic_exact", |b| b.iter(|| recover_generic(black_box(&m), &tol).unwrap()));
    c.bench_function("membership_exact_n4", |b| b.iter(|| membership_test(black_box(&p), &tol).unwrap()));
    let pf = p.map(Scalar::to_f64);
    c.bench_function("membership_f64_n4", |b| b.iter(|| membership_test(black_box(&pf), &tol).unwrap()));
}

criterion_group!(benches, coords, recovery);
criterion_main!(benches);
