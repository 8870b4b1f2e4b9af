//! Random rational parameter points for tests and benchmarks.
//!
//! Entries are drawn as `k/d` with small denominators so that exact
//! arithmetic stays cheap.

use rand::Rng;

use crate::multistate::MultistateParams;
use crate::params::{BirationalParams, StochasticParams};
use crate::scalar::{Rational, Scalar};

/// A rational in `[0, 1]` with denominator at most `max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    Rational::from_ratio(rng.gen_range(0..=den), den)
}

/// A rational in `(0, 1)` with denominator at most `max_den`.
pub fn open_unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(2..=max_den.max(2));
    Rational::from_ratio(rng.gen_range(1..den), den)
}

/// A nonzero rational in `[-1, 1]`.
pub fn signed_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    loop {
        let num = rng.gen_range(-den..=den);
        if num != 0 {
            return Rational::from_ratio(num, den);
        }
    }
}

fn binary_row(x: Rational) -> [Rational; 2] {
    [Rational::one() - x.clone(), x]
}

/// A stochastic parameter point with entries in `(0, 1)`.
pub fn stochastic<R: Rng>(rng: &mut R) -> StochasticParams<Rational> {
    let mut draw = || open_unit_rational(rng, 12);
    StochasticParams::from_parts(
        binary_row(draw()),
        [binary_row(draw()), binary_row(draw())],
        [binary_row(draw()), binary_row(draw())],
    )
}

/// A stochastic point whose `π` is the stationary vector of `T`.
pub fn stationary<R: Rng>(rng: &mut R) -> StochasticParams<Rational> {
    let mut draw = || open_unit_rational(rng, 12);
    let (t01, t10) = (draw(), draw());
    let pi1 = t01.clone() / (t01.clone() + t10.clone());
    StochasticParams::from_parts(
        binary_row(pi1),
        [binary_row(t01), [t10.clone(), Rational::one() - t10]],
        [binary_row(draw()), binary_row(draw())],
    )
}

/// Arbitrary `(a, b, c, u, v)` with every coordinate nonzero; `v` may be
/// negative.
pub fn birational<R: Rng>(rng: &mut R) -> BirationalParams<Rational> {
    let mut draw = || signed_rational(rng, 9);
    BirationalParams::new(draw(), draw(), draw(), draw(), draw())
}

/// A stochastic point with `k` symbols and positive emission rows.
pub fn multistate<R: Rng>(rng: &mut R, k: usize) -> MultistateParams<Rational> {
    let emission_row = |rng: &mut R| -> Vec<Rational> {
        let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
        let total: i64 = weights.iter().sum();
        weights.into_iter().map(|w| Rational::from_ratio(w, total)).collect()
    };
    let e = [emission_row(rng), emission_row(rng)];
    let mut draw = || open_unit_rational(rng, 12);
    MultistateParams::from_parts(binary_row(draw()), [binary_row(draw()), binary_row(draw())], e)
}

/// A point of the probability simplex on `n` nodes with positive entries.
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..1usize << n).map(|_| rng.gen_range(1..=50)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| Rational::from_ratio(w, total)).collect()
}
