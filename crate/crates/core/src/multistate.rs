//! Two hidden states with `k` visible symbols.
//!
//! Indicating one symbol `ℓ` (visible 1 iff the symbol is `ℓ`) turns the
//! process into a binary one with emission column `E_{·ℓ}`. Recovering each
//! of the `k` binary reductions and aligning their square-root signs
//! identifies the whole process up to swapping the hidden states.
//!
//! Symbols are numbered `1..=k` in the API and stored as digits `0..k` in
//! string indices, first node most significant.

use crate::coords::{CoordSystem, Distribution, MAX_NODES};
use crate::error::{Error, Result};
use crate::params::{BirationalParams, LinearParams, Sign, StochasticParams};
use crate::recover::{classify, StratumParams};
use crate::scalar::{Scalar, Surd, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct MultistateParams<S> {
    pi: [S; 2],
    transition: [[S; 2]; 2],
    emission: [Vec<S>; 2],
}

impl<S: Scalar> MultistateParams<S> {
    /// Checks `k ≥ 2`, equal row lengths and unit row sums. Entries may lie
    /// outside `[0, 1]`.
    pub fn new(pi: [S; 2], transition: [[S; 2]; 2], emission: [Vec<S>; 2], tol: &Tolerance) -> Result<Self> {
        let k = emission[0].len();
        if k < 2 || emission[1].len() != k {
            return Err(Error::MalformedParameters(format!(
                "emission rows must have equal length k ≥ 2, got {} and {}",
                emission[0].len(),
                emission[1].len()
            )));
        }
        let one = S::one();
        let sum = |xs: &[S]| xs.iter().cloned().fold(S::zero(), |a, x| a + x);
        let rows: [(&str, S); 5] = [
            ("pi", sum(&pi)),
            ("T[0]", sum(&transition[0])),
            ("T[1]", sum(&transition[1])),
            ("E[0]", sum(&emission[0])),
            ("E[1]", sum(&emission[1])),
        ];
        if let Some((name, s)) = rows.iter().find(|(_, s)| !tol.eq(s, &one)) {
            return Err(Error::MalformedParameters(format!("row {name} sums to {s}, not 1")));
        }
        Ok(Self { pi, transition, emission })
    }

    pub(crate) fn from_parts(pi: [S; 2], transition: [[S; 2]; 2], emission: [Vec<S>; 2]) -> Self {
        Self { pi, transition, emission }
    }

    pub fn k(&self) -> usize {
        self.emission[0].len()
    }

    pub fn pi(&self) -> &[S; 2] {
        &self.pi
    }

    pub fn transition(&self) -> &[[S; 2]; 2] {
        &self.transition
    }

    pub fn emission(&self) -> &[Vec<S>; 2] {
        &self.emission
    }

    pub fn is_stochastic(&self) -> bool {
        let ok = |x: &S| *x >= S::zero() && *x <= S::one();
        self.pi.iter().chain(self.transition.iter().flatten()).chain(self.emission.iter().flatten()).all(ok)
    }

    /// Relabels the hidden states.
    pub fn swap(&self) -> Self {
        let t = &self.transition;
        Self {
            pi: [self.pi[1].clone(), self.pi[0].clone()],
            transition: [[t[1][1].clone(), t[1][0].clone()], [t[0][1].clone(), t[0][0].clone()]],
            emission: [self.emission[1].clone(), self.emission[0].clone()],
        }
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> MultistateParams<R> {
        let m2 = |m: &[[S; 2]; 2]| [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]];
        MultistateParams {
            pi: [f(&self.pi[0]), f(&self.pi[1])],
            transition: m2(&self.transition),
            emission: [self.emission[0].iter().map(&f).collect(), self.emission[1].iter().map(&f).collect()],
        }
    }

    fn check_symbol(&self, ell: usize) -> Result<()> {
        if ell == 0 || ell > self.k() {
            return Err(Error::OutOfRange(format!("symbol {ell} outside 1..={}", self.k())));
        }
        Ok(())
    }
}

impl<S: Scalar> MultistateParams<Surd<S>> {
    pub fn to_base(&self) -> Option<MultistateParams<S>> {
        let all = self.pi.iter().chain(self.transition.iter().flatten()).chain(self.emission.iter().flatten());
        if all.clone().any(|x| x.to_base().is_none()) {
            return None;
        }
        Some(self.map(|x| x.to_base().expect("checked")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultistateDistribution<S> {
    n: usize,
    k: usize,
    values: Vec<S>,
}

impl<S: Scalar> MultistateDistribution<S> {
    pub fn new(n: usize, k: usize, values: Vec<S>) -> Result<Self> {
        let len = checked_len(n, k)?;
        if values.len() != len {
            return Err(Error::MalformedDistribution(format!("expected {k}^{n} = {len} values, got {}", values.len())));
        }
        Ok(Self { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Symbols (`0..k`) of the string at `index`, first node first.
    pub fn symbols(&self, index: usize) -> Vec<usize> {
        symbols(self.n, self.k, index)
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> MultistateDistribution<R> {
        MultistateDistribution { n: self.n, k: self.k, values: self.values.iter().map(f).collect() }
    }
}

fn checked_len(n: usize, k: usize) -> Result<usize> {
    if n == 0 || k < 2 {
        return Err(Error::OutOfRange(format!("need n ≥ 1 and k ≥ 2, got n = {n}, k = {k}")));
    }
    match k.checked_pow(n as u32) {
        Some(len) if len <= 1 << MAX_NODES => Ok(len),
        _ => Err(Error::OutOfRange(format!("{k}^{n} strings is too many"))),
    }
}

fn symbols(n: usize, k: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

/// `p(s) = π P_{s₁}⋯P_{sₙ} 𝟙` with `(P_ℓ)_{jh} = E_{jℓ} T_{jh}`.
pub fn forward_multistate<S: Scalar>(params: &MultistateParams<S>, n: usize) -> Result<MultistateDistribution<S>> {
    let k = params.k();
    checked_len(n, k)?;
    let (t, e) = (&params.transition, &params.emission);
    let mut level = vec![params.pi.clone()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * k);
        for row in &level {
            for ell in 0..k {
                let w = [row[0].clone() * e[0][ell].clone(), row[1].clone() * e[1][ell].clone()];
                next.push([
                    w[0].clone() * t[0][0].clone() + w[1].clone() * t[1][0].clone(),
                    w[0].clone() * t[0][1].clone() + w[1].clone() * t[1][1].clone(),
                ]);
            }
        }
        level = next;
    }
    MultistateDistribution::new(n, k, level.into_iter().map(|[x, y]| x + y).collect())
}

/// The binary process indicating symbol `ell`: emission
/// `[[1 − E₀ℓ, E₀ℓ], [1 − E₁ℓ, E₁ℓ]]`.
pub fn reduce<S: Scalar>(params: &MultistateParams<S>, ell: usize) -> Result<StochasticParams<S>> {
    params.check_symbol(ell)?;
    let col = ell - 1;
    let row = |j: usize| [S::one() - params.emission[j][col].clone(), params.emission[j][col].clone()];
    Ok(StochasticParams::from_parts(params.pi.clone(), params.transition.clone(), [row(0), row(1)]))
}

/// Pushforward of `d` along the indicator of symbol `ell`.
pub fn reduce_distribution<S: Scalar>(d: &MultistateDistribution<S>, ell: usize) -> Result<Distribution<S>> {
    if ell == 0 || ell > d.k {
        return Err(Error::OutOfRange(format!("symbol {ell} outside 1..={}", d.k)));
    }
    let mut out = vec![S::zero(); 1 << d.n];
    for (index, x) in d.values.iter().enumerate() {
        let bits = d.symbols(index).iter().fold(0usize, |acc, &s| acc << 1 | (s == ell - 1) as usize);
        out[bits] = out[bits].clone() + x.clone();
    }
    Distribution::new(d.n, CoordSystem::Probability, out)
}

/// `P(x₁ = ℓ, x₂ = ℓ')` for 1-based symbols.
fn pair_probability<S: Scalar>(d: &MultistateDistribution<S>, ell: usize, ell2: usize) -> S {
    let stride = d.k.pow(d.n as u32 - 2);
    let start = ((ell - 1) * d.k + (ell2 - 1)) * stride;
    d.values[start..start + stride].iter().cloned().fold(S::zero(), |a, x| a + x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnRecovery<S> {
    /// Recovered `(a, b, c, u, v)` of the reduction.
    Informative(BirationalParams<S>),
    /// The reduction is i.i.d.: `E₀ℓ = E₁ℓ = u`.
    Degenerate { u: S },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identification<S: Scalar> {
    /// The swap representative with `v₀ > 0` at the reference symbol.
    pub params: MultistateParams<Surd<S>>,
    /// 1-based symbol whose recovery fixed `(a₀, b, c₀)` and the sign.
    pub reference: usize,
    pub columns: Vec<ColumnRecovery<S>>,
    /// `Σ_ℓ E_{jℓ} − 1` for each hidden state.
    pub row_sum_defect: [Surd<S>; 2],
    /// Whether the identified parameters reproduce the input on all nodes.
    pub reproduces: bool,
}

/// Identifies a two-hidden-state process from its distribution on `n ≥ 3`
/// nodes.
///
/// Each reduction yields `(a(ℓ), b, c(ℓ), u(ℓ), v(ℓ))` with `a(ℓ) = a₀v₀(ℓ)`
/// and `c(ℓ) = c₀v₀(ℓ)`. The first informative symbol fixes `v₀ = +√v`; the
/// others are scaled by `a(ℓ)/a(ℓ*)`, or `c(ℓ)/c(ℓ*)` when `a₀ = 0`. If both
/// `a₀` and `c₀` vanish, the two-node statistic
/// `P(x₁ = ℓ, x₂ = ℓ*) = u(ℓ)u(ℓ*) + b·v₀(ℓ)v₀(ℓ*)` fixes the ratio.
/// Then `E₀ℓ = u − v₀` and `E₁ℓ = u + v₀`.
pub fn identify<S: Scalar>(d: &MultistateDistribution<S>, tol: &Tolerance) -> Result<Identification<S>> {
    if d.n < 3 {
        return Err(Error::OutOfRange(format!("identification needs n ≥ 3, got {}", d.n)));
    }
    let mut columns = Vec::with_capacity(d.k);
    for ell in 1..=d.k {
        let m = reduce_distribution(d, ell)?.prob_to_moment()?;
        let outcome = classify(&m, tol)?;
        let column = match outcome.params {
            Some(StratumParams::Generic(eta)) => ColumnRecovery::Informative(eta),
            Some(StratumParams::Equilibrium(e)) => ColumnRecovery::Informative(e.to_birational()),
            Some(StratumParams::Biid { u }) => ColumnRecovery::Degenerate { u },
            other => {
                let found = other.map_or("no stratum".to_string(), |p| p.stratum().to_string());
                return Err(Error::IdentificationFailed(format!(
                    "reduction for symbol {ell} is not identifiable ({found})"
                )));
            }
        };
        columns.push(column);
    }
    let Some((reference, star)) = columns.iter().enumerate().find_map(|(i, c)| match c {
        ColumnRecovery::Informative(eta) => Some((i + 1, eta.clone())),
        _ => None,
    }) else {
        return Err(Error::IdentificationFailed("every reduction is i.i.d.; the hidden chain is not visible".into()));
    };
    if tol.is_negative(&star.v) {
        return Err(Error::NotAModelDistribution(format!("symbol {reference}: recovered v = {} is negative", star.v)));
    }
    let lin = star.lift_algebraic(Sign::Plus)?;
    let v0_star = lin.v0.clone();
    let a_zero = tol.vanishes(&star.a, 1.0);
    let c_zero = tol.vanishes(&star.c, 1.0);

    let surd = |x: &S| Surd::from_base(x.clone());
    let mut e0 = Vec::with_capacity(d.k);
    let mut e1 = Vec::with_capacity(d.k);
    for (i, column) in columns.iter().enumerate() {
        let ell = i + 1;
        let (u, v0) = match column {
            ColumnRecovery::Degenerate { u } => (surd(u), Surd::from_base(S::zero())),
            ColumnRecovery::Informative(eta) => {
                let ratio = if !a_zero {
                    eta.a.clone() / star.a.clone()
                } else if !c_zero {
                    eta.c.clone() / star.c.clone()
                } else {
                    let cross = pair_probability(d, ell, reference) - eta.u.clone() * star.u.clone();
                    cross / (star.b.clone() * star.v.clone())
                };
                let consistent = tol.eq(&eta.b, &star.b)
                    && tol.eq(&(ratio.clone() * ratio.clone() * star.v.clone()), &eta.v)
                    && tol.eq(&eta.a, &(ratio.clone() * star.a.clone()))
                    && tol.eq(&eta.c, &(ratio.clone() * star.c.clone()));
                if !consistent {
                    return Err(Error::NotAModelDistribution(format!(
                        "reductions for symbols {reference} and {ell} disagree on the hidden chain"
                    )));
                }
                (surd(&eta.u), surd(&ratio) * v0_star.clone())
            }
        };
        e0.push(u.clone() - v0.clone());
        e1.push(u + v0);
    }
    let chain = LinearParams::new(lin.a0, lin.b, lin.c0, lin.u, lin.v0).to_stochastic();
    let params = MultistateParams::from_parts(chain.pi().clone(), chain.transition().clone(), [e0, e1]);
    let one = Surd::from_base(S::one());
    let row_sum = |row: &[Surd<S>]| row.iter().cloned().fold(Surd::from_base(S::zero()), |a, x| a + x) - one.clone();
    let row_sum_defect = [row_sum(&params.emission[0]), row_sum(&params.emission[1])];
    let image = forward_multistate(&params, d.n)?;
    let reproduces = image.values.iter().zip(&d.values).all(|(x, y)| tol.eq(x, &surd(y)));
    Ok(Identification { params, reference, columns, row_sum_defect, reproduces })
}
