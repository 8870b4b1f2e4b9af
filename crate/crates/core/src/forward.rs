//! The modeling maps from parameters to observed distributions.
//!
//! [`phi_bruteforce`] sums over hidden paths directly and serves as the
//! reference. [`phi_baum`] uses the matrix-product form
//! `p_v = π P_{v₁}⋯P_{vₙ} 𝟙` and its moment analogue
//! `m_v = tr(M₂ M_{v₁}⋯M_{vₙ})`, sharing prefix products across strings.
//! [`psi3`] and [`psi_n`] evaluate the same map on the identifiable
//! parameters `(a, b, c, u, v)`.

use std::any::Any;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::{CoordSystem, Distribution};
use crate::error::{Error, Result};
use crate::params::{BirationalParams, LinearParams, Sign, StochasticParams};
use crate::scalar::{Rational, Scalar, Surd, Tolerance};

type Mat2<S> = [[S; 2]; 2];

fn mat_mul<S: Scalar>(x: &Mat2<S>, y: &Mat2<S>) -> Mat2<S> {
    let e = |i: usize, j: usize| x[i][0].clone() * y[0][j].clone() + x[i][1].clone() * y[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn trace<S: Scalar>(x: &Mat2<S>) -> S {
    x[0][0].clone() + x[1][1].clone()
}

fn row_times<S: Scalar>(row: &[S; 2], m: &Mat2<S>) -> [S; 2] {
    [
        row[0].clone() * m[0][0].clone() + row[1].clone() * m[1][0].clone(),
        row[0].clone() * m[0][1].clone() + row[1].clone() * m[1][1].clone(),
    ]
}

/// `(P_i)_{jk} = E_{ji} T_{jk}`, `M₀ = P₀ + P₁ = T`, `M₁ = P₁`, `M₂ = 𝟙π`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaumMatrices<S> {
    pub p0: Mat2<S>,
    pub p1: Mat2<S>,
    pub m0: Mat2<S>,
    pub m1: Mat2<S>,
    pub m2: Mat2<S>,
}

impl<S: Scalar> BaumMatrices<S> {
    pub fn new(theta: &StochasticParams<S>) -> Self {
        let t = theta.transition();
        let e = theta.emission();
        let p = |i: usize| -> Mat2<S> {
            [
                [e[0][i].clone() * t[0][0].clone(), e[0][i].clone() * t[0][1].clone()],
                [e[1][i].clone() * t[1][0].clone(), e[1][i].clone() * t[1][1].clone()],
            ]
        };
        let (p0, p1) = (p(0), p(1));
        let m0 = [
            [p0[0][0].clone() + p1[0][0].clone(), p0[0][1].clone() + p1[0][1].clone()],
            [p0[1][0].clone() + p1[1][0].clone(), p0[1][1].clone() + p1[1][1].clone()],
        ];
        let pi = theta.pi();
        let m2 = [[pi[0].clone(), pi[1].clone()], [pi[0].clone(), pi[1].clone()]];
        Self { m1: p1.clone(), p0, p1, m0, m2 }
    }
}

/// `p_v = Σ_h π_{h₁}E_{h₁v₁} Π_{i≥2} T_{h_{i−1}h_i}E_{h_iv_i}`, enumerating
/// every hidden path for every observed string (`O(4ⁿ)`).
pub fn phi_bruteforce<S: Scalar>(theta: &StochasticParams<S>, n: usize) -> Result<Distribution<S>> {
    check_nodes(n)?;
    // Exact rationals take an integer path: reducing a fraction after every
    // product dominates the cost otherwise.
    if let Some(exact) = (theta as &dyn Any).downcast_ref::<StochasticParams<Rational>>() {
        let values: Box<dyn Any> = Box::new(bruteforce_cleared(exact, n));
        let values = *values.downcast::<Vec<S>>().expect("S is Rational");
        return Distribution::new(n, CoordSystem::Probability, values);
    }
    let t = theta.transition();
    let e = theta.emission();
    let start = std::array::from_fn(|h| std::array::from_fn(|v| theta.pi()[h].clone() * e[h][v].clone()));
    let step = std::array::from_fn(|h| {
        std::array::from_fn(|h2| std::array::from_fn(|v| t[h][h2].clone() * e[h2][v].clone()))
    });
    Distribution::new(n, CoordSystem::Probability, path_sum(start, step, n, S::zero()))
}

/// Sum of path weights per observed string, depth-first over joint
/// (hidden, visible) prefixes. `start[h][v]` weighs the first node and
/// `step[h][h2][v]` each later one.
fn path_sum<W>(start: [[W; 2]; 2], step: [[[W; 2]; 2]; 2], n: usize, zero: W) -> Vec<W>
where
    W: Clone + std::ops::Add<Output = W> + std::ops::Mul<Output = W>,
{
    let mut out = vec![zero; 1 << n];
    let mut stack: Vec<(usize, usize, usize, W)> = Vec::new();
    for (h, row) in start.into_iter().enumerate() {
        for (v, w) in row.into_iter().enumerate() {
            stack.push((1, h, v, w));
        }
    }
    while let Some((depth, h, index, weight)) = stack.pop() {
        if depth == n {
            out[index] = out[index].clone() + weight;
            continue;
        }
        for h2 in 0..2 {
            for v in 0..2 {
                stack.push((depth + 1, h2, index << 1 | v, weight.clone() * step[h][h2][v].clone()));
            }
        }
    }
    out
}

/// Path sum with every parameter written over one common denominator `D`;
/// each path weight is then an integer over `D²ⁿ`.
fn bruteforce_cleared(theta: &StochasticParams<Rational>, n: usize) -> Vec<Rational> {
    let (pi, t, e) = (theta.pi(), theta.transition(), theta.emission());
    let den = pi.iter().chain(t.iter().flatten()).chain(e.iter().flatten()).fold(BigInt::one(), |d, x| d.lcm(x.denom()));
    let int = |x: &Rational| x.numer() * (&den / x.denom());
    let start = std::array::from_fn(|h| std::array::from_fn(|v| int(&pi[h]) * int(&e[h][v])));
    let step = std::array::from_fn(|h| std::array::from_fn(|h2| std::array::from_fn(|v| int(&t[h][h2]) * int(&e[h2][v]))));
    let scale = num_traits::pow(den, 2 * n);
    path_sum(start, step, n, BigInt::zero()).into_iter().map(|x| Rational::new(x, scale.clone())).collect()
}

/// Baum-formula evaluation of the modeling map in any coordinate system.
pub fn phi_baum<S: Scalar>(theta: &StochasticParams<S>, n: usize, system: CoordSystem) -> Result<Distribution<S>> {
    check_nodes(n)?;
    let mats = BaumMatrices::new(theta);
    let values = match system {
        CoordSystem::Probability => row_products(theta.pi(), [&mats.p0, &mats.p1], n),
        CoordSystem::Moment | CoordSystem::Cumulant => row_products(theta.pi(), [&mats.m0, &mats.m1], n),
    };
    let moments = Distribution::new(n, if system == CoordSystem::Probability { system } else { CoordSystem::Moment }, values)?;
    match system {
        CoordSystem::Cumulant => moments.moment_to_cumulant(&Tolerance::default()),
        _ => Ok(moments),
    }
}

/// `π X_{v₁}⋯X_{vₙ} 𝟙` for every string, level by level so that each prefix
/// product is computed once.
fn row_products<S: Scalar>(pi: &[S; 2], mats: [&Mat2<S>; 2], n: usize) -> Vec<S> {
    let mut level = vec![pi.clone()];
    for _ in 0..n {
        level = level.iter().flat_map(|row| [row_times(row, mats[0]), row_times(row, mats[1])]).collect();
    }
    level.into_iter().map(|[x, y]| x + y).collect()
}

fn check_nodes(n: usize) -> Result<()> {
    if n == 0 || n > crate::coords::MAX_NODES {
        return Err(Error::OutOfRange(format!("node count {n} outside 1..={}", crate::coords::MAX_NODES)));
    }
    Ok(())
}

/// Closed-form moments of the three-node model in `(a, b, c, u, v)`.
pub fn psi3<S: Scalar>(eta: &BirationalParams<S>) -> Distribution<S> {
    let BirationalParams { a, b, c, u, v } = eta.clone();
    let i = |k: i64| S::from_int(k);
    let m1 = a.clone() + u.clone();
    let m2 = a.clone() * b.clone() + c.clone() + u.clone();
    let m3 = a.clone() * b.clone() * b.clone() + b.clone() * c.clone() + c.clone() + u.clone();
    let m12 = a.clone() * b.clone() * u.clone()
        + a.clone() * c.clone()
        + a.clone() * u.clone()
        + c.clone() * u.clone()
        + u.clone() * u.clone()
        + b.clone() * v.clone();
    let m13 = a.clone() * b.clone() * b.clone() * u.clone()
        + a.clone() * b.clone() * c.clone()
        + b.clone() * c.clone() * u.clone()
        + b.clone() * b.clone() * v.clone()
        + a.clone() * c.clone()
        + a.clone() * u.clone()
        + c.clone() * u.clone()
        + u.clone() * u.clone();
    let m23 = a.clone() * b.clone() * b.clone() * u.clone()
        + a.clone() * b.clone() * c.clone()
        + a.clone() * b.clone() * u.clone()
        + b.clone() * c.clone() * u.clone()
        + c.clone() * c.clone()
        + i(2) * c.clone() * u.clone()
        + u.clone() * u.clone()
        + b.clone() * v.clone();
    let m123 = a.clone() * b.clone() * b.clone() * u.clone() * u.clone()
        + i(2) * a.clone() * b.clone() * c.clone() * u.clone()
        + a.clone() * b.clone() * u.clone() * u.clone()
        + b.clone() * c.clone() * u.clone() * u.clone()
        + b.clone() * b.clone() * u.clone() * v.clone()
        + a.clone() * c.clone() * c.clone()
        + i(2) * a.clone() * c.clone() * u.clone()
        + c.clone() * c.clone() * u.clone()
        + a.clone() * u.clone() * u.clone()
        + i(2) * c.clone() * u.clone() * u.clone()
        + u.clone() * u.clone() * u.clone()
        + a.clone() * b.clone() * v.clone()
        + b.clone() * c.clone() * v.clone()
        + i(2) * b * u * v;
    // Index order: 000, 001, 010, 011, 100, 101, 110, 111.
    let values = vec![S::one(), m3, m2, m23, m1, m13, m12, m123];
    Distribution::new(3, CoordSystem::Moment, values).expect("shape is fixed")
}

/// Moments of the `n`-node model at `(a, b, c, u, v)`, for `v ≥ 0`.
///
/// Evaluated by lifting into `S(√v)` and running the Baum recursion; every
/// output moment is a polynomial in `(a, b, c, u, v)`, so the result is
/// independent of the lift and has no radical part.
pub fn psi_n<S: Scalar>(eta: &BirationalParams<S>, n: usize) -> Result<Distribution<S>> {
    psi_n_signed(eta, n, Sign::Plus)
}

/// [`psi_n`] through an explicit choice of lift sign.
pub fn psi_n_signed<S: Scalar>(eta: &BirationalParams<S>, n: usize, sign: Sign) -> Result<Distribution<S>> {
    eta.lift_algebraic(sign)?;
    psi_n_formal(eta, n, sign)
}

/// Polynomial evaluation with no reality requirement on `v`.
pub(crate) fn psi_n_formal<S: Scalar>(eta: &BirationalParams<S>, n: usize, sign: Sign) -> Result<Distribution<S>> {
    let lifted = eta.lift_unchecked(sign);
    let moments = phi_baum(&lifted.to_stochastic(), n, CoordSystem::Moment)?;
    Ok(moments.map(|x: &Surd<S>| {
        debug_assert!(x.radical_part().is_zero() || !S::EXACT, "moment {x} has a radical part");
        x.rational_part().clone()
    }))
}

/// Images of the ten trace-algebra generators, computed twice.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceGenerators<S> {
    /// From the matrices `M₀, M₁, M₂` built out of `(π, T, E)`.
    pub by_matrix: [S; 10],
    /// From the closed forms in `(a, b, c, u, v)`.
    pub closed_form: [S; 10],
}

impl<S: Scalar> TraceGenerators<S> {
    pub const NAMES: [&'static str; 10] = [
        "tr(M0)", "tr(M1)", "tr(M2)", "tr(M0^2)", "tr(M1^2)", "tr(M2^2)", "tr(M0M1)", "tr(M0M2)", "tr(M1M2)",
        "tr(M0M1M2)",
    ];

    pub fn agree(&self) -> bool {
        self.by_matrix == self.closed_form
    }

    pub fn values(&self) -> &[S; 10] {
        &self.by_matrix
    }
}

pub fn trace_generators<S: Scalar>(eta0: &LinearParams<S>) -> TraceGenerators<S> {
    let m = BaumMatrices::new(&eta0.to_stochastic());
    let by_matrix = [
        trace(&m.m0),
        trace(&m.m1),
        trace(&m.m2),
        trace(&mat_mul(&m.m0, &m.m0)),
        trace(&mat_mul(&m.m1, &m.m1)),
        trace(&mat_mul(&m.m2, &m.m2)),
        trace(&mat_mul(&m.m0, &m.m1)),
        trace(&mat_mul(&m.m0, &m.m2)),
        trace(&mat_mul(&m.m1, &m.m2)),
        trace(&mat_mul(&mat_mul(&m.m0, &m.m1), &m.m2)),
    ];
    let BirationalParams { a, b, c, u, v } = eta0.q_map();
    let one = S::one();
    let two = S::from_int(2);
    let closed_form = [
        b.clone() + one.clone(),
        b.clone() * u.clone() + c.clone() + u.clone(),
        one.clone(),
        b.clone() * b.clone() + one.clone(),
        b.clone() * b.clone() * u.clone() * u.clone()
            + two.clone() * b.clone() * c.clone() * u.clone()
            + c.clone() * c.clone()
            + two.clone() * c.clone() * u.clone()
            + u.clone() * u.clone()
            + two * b.clone() * v,
        one.clone(),
        b.clone() * b.clone() * u.clone() + b.clone() * c.clone() + c.clone() + u.clone(),
        one,
        a.clone() + u.clone(),
        a * b + c + u,
    ];
    TraceGenerators { by_matrix, closed_form }
}

/// Draws `count` observed strings of length `n` from the process.
pub fn sample_sequences<S: Scalar>(theta: &StochasticParams<S>, n: usize, count: usize, seed: u64) -> Result<Vec<String>> {
    if !theta.is_stochastic() {
        return Err(Error::NonStochastic("cannot sample from a non-stochastic parameter point".into()));
    }
    check_nodes(n)?;
    let f = theta.map(|x| x.to_f64());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |p_one: f64| -> usize { (rng.gen::<f64>() < p_one) as usize };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut s = String::with_capacity(n);
        let mut h = draw(f.pi()[1]);
        for t in 0..n {
            if t > 0 {
                h = draw(f.transition()[h][1]);
            }
            s.push(if draw(f.emission()[h][1]) == 1 { '1' } else { '0' });
        }
        out.push(s);
    }
    Ok(out)
}
