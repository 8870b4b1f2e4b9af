//! Parameter spaces of a binary hidden Markov process.
//!
//! A process is given by `(π, T, E)` ([`StochasticParams`]). The linear
//! coordinates `(a₀, b, c₀, u, v₀)` ([`LinearParams`]) are related to it by
//!
//! ```text
//! π = ½ (1 − a₀, 1 + a₀)
//! T = ½ [[1 + b − c₀, 1 − b + c₀], [1 − b − c₀, 1 + b + c₀]]
//! E =   [[1 − u + v₀,     u − v₀], [1 − u − v₀,     u + v₀]]
//! ```
//!
//! Relabeling the hidden states negates `a₀, c₀, v₀`. The swap-invariant
//! combinations `(a, b, c, u, v) = (a₀v₀, b, c₀v₀, u, v₀²)`
//! ([`BirationalParams`]) are exactly what the observed distribution
//! determines.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Surd, Tolerance};

/// Initial distribution, transition and emission matrices.
///
/// Rows always sum to one; entries may fall outside `[0, 1]`, in which case
/// [`is_stochastic`](Self::is_stochastic) is `false`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticParams<S> {
    pi: [S; 2],
    transition: [[S; 2]; 2],
    emission: [[S; 2]; 2],
    stochastic: bool,
}

impl<S: Scalar> StochasticParams<S> {
    /// Validates unit row sums (exactly, or within `tol` for floats).
    pub fn new(pi: [S; 2], transition: [[S; 2]; 2], emission: [[S; 2]; 2], tol: &Tolerance) -> Result<Self> {
        let rows = [("pi", &pi), ("T[0]", &transition[0]), ("T[1]", &transition[1]), ("E[0]", &emission[0]), ("E[1]", &emission[1])];
        for (name, row) in rows {
            let sum = row[0].clone() + row[1].clone();
            if !tol.eq(&sum, &S::one()) {
                return Err(Error::MalformedParameters(format!("row {name} sums to {sum}, not 1")));
            }
        }
        Ok(Self::from_parts(pi, transition, emission))
    }

    /// Builds without checking row sums; callers guarantee them.
    pub(crate) fn from_parts(pi: [S; 2], transition: [[S; 2]; 2], emission: [[S; 2]; 2]) -> Self {
        let stochastic = pi
            .iter()
            .chain(transition.iter().flatten())
            .chain(emission.iter().flatten())
            .all(|x| *x >= S::zero() && *x <= S::one());
        Self { pi, transition, emission, stochastic }
    }

    pub fn pi(&self) -> &[S; 2] {
        &self.pi
    }

    pub fn transition(&self) -> &[[S; 2]; 2] {
        &self.transition
    }

    pub fn emission(&self) -> &[[S; 2]; 2] {
        &self.emission
    }

    /// All entries lie in `[0, 1]`.
    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    /// Named entries in a fixed order: `pi[0]`, `pi[1]`, `T[0][0]`, …, `E[1][1]`.
    pub fn entries(&self) -> Vec<(String, &S)> {
        let mut out = vec![("pi[0]".to_string(), &self.pi[0]), ("pi[1]".to_string(), &self.pi[1])];
        for (label, m) in [("T", &self.transition), ("E", &self.emission)] {
            for (i, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out.push((format!("{label}[{i}][{j}]"), x));
                }
            }
        }
        out
    }

    /// First entry outside `[0, 1]` (widened by the tolerance for floats).
    pub fn first_non_stochastic_entry(&self, tol: &Tolerance) -> Option<(String, S)> {
        self.entries()
            .into_iter()
            .find(|(_, x)| !tol.in_unit_interval(*x))
            .map(|(name, x)| (name, x.clone()))
    }

    /// Solves the linear reparametrization for `(a₀, b, c₀, u, v₀)`.
    pub fn to_linear(&self) -> LinearParams<S> {
        let [p0, p1] = self.pi.clone();
        let t = &self.transition;
        let e = &self.emission;
        LinearParams {
            a0: p1 - p0,
            b: t[0][0].clone() + t[1][1].clone() - S::one(),
            c0: t[1][1].clone() - t[0][0].clone(),
            u: (e[0][1].clone() + e[1][1].clone()) * S::half(),
            v0: (e[1][1].clone() - e[0][1].clone()) * S::half(),
        }
    }

    /// Relabels the hidden alphabet: `(πσ, σTσ, σE)`.
    pub fn swap(&self) -> Self {
        let [p0, p1] = self.pi.clone();
        let [[t00, t01], [t10, t11]] = self.transition.clone();
        let [e0, e1] = self.emission.clone();
        Self {
            pi: [p1, p0],
            transition: [[t11, t10], [t01, t00]],
            emission: [e1, e0],
            stochastic: self.stochastic,
        }
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> StochasticParams<R> {
        let m2 = |m: &[[S; 2]; 2]| [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]];
        StochasticParams::from_parts([f(&self.pi[0]), f(&self.pi[1])], m2(&self.transition), m2(&self.emission))
    }
}

impl<S: Scalar> StochasticParams<Surd<S>> {
    /// Drops to the base scalar when no entry carries a radical part.
    pub fn to_base(&self) -> Option<StochasticParams<S>> {
        if self.entries().iter().all(|(_, x)| x.to_base().is_some()) {
            Some(self.map(|x| x.to_base().expect("checked above")))
        } else {
            None
        }
    }
}

/// Linear coordinates `(a₀, b, c₀, u, v₀)` of the parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams<S> {
    pub a0: S,
    pub b: S,
    pub c0: S,
    pub u: S,
    pub v0: S,
}

impl<S: Scalar> LinearParams<S> {
    pub fn new(a0: S, b: S, c0: S, u: S, v0: S) -> Self {
        Self { a0, b, c0, u, v0 }
    }

    /// Builds `(π, T, E)`. Row sums are one by construction.
    pub fn to_stochastic(&self) -> StochasticParams<S> {
        let one = S::one();
        let h = S::half();
        let Self { a0, b, c0, u, v0 } = self.clone();
        let pi = [(one.clone() - a0.clone()) * h.clone(), (one.clone() + a0) * h.clone()];
        let transition = [
            [
                (one.clone() + b.clone() - c0.clone()) * h.clone(),
                (one.clone() - b.clone() + c0.clone()) * h.clone(),
            ],
            [
                (one.clone() - b.clone() - c0.clone()) * h.clone(),
                (one.clone() + b + c0) * h,
            ],
        ];
        let emission = [
            [one.clone() - u.clone() + v0.clone(), u.clone() - v0.clone()],
            [one - u.clone() - v0.clone(), u + v0],
        ];
        StochasticParams::from_parts(pi, transition, emission)
    }

    /// Hidden-label swap in linear coordinates.
    pub fn swap(&self) -> Self {
        Self {
            a0: -self.a0.clone(),
            b: self.b.clone(),
            c0: -self.c0.clone(),
            u: self.u.clone(),
            v0: -self.v0.clone(),
        }
    }

    /// The generically 2:1 quotient `(a₀v₀, b, c₀v₀, u, v₀²)`.
    pub fn q_map(&self) -> BirationalParams<S> {
        BirationalParams {
            a: self.a0.clone() * self.v0.clone(),
            b: self.b.clone(),
            c: self.c0.clone() * self.v0.clone(),
            u: self.u.clone(),
            v: self.v0.clone() * self.v0.clone(),
        }
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> LinearParams<R> {
        LinearParams { a0: f(&self.a0), b: f(&self.b), c0: f(&self.c0), u: f(&self.u), v0: f(&self.v0) }
    }
}

/// Identifiable coordinates `(a, b, c, u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirationalParams<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub u: S,
    pub v: S,
}

/// Choice of square root when lifting `v` back to `v₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply<S: Scalar>(self, x: S) -> S {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }
}

impl<S: Scalar> BirationalParams<S> {
    pub fn new(a: S, b: S, c: S, u: S, v: S) -> Self {
        Self { a, b, c, u, v }
    }

    /// `(λa, b, λc, λu, λ²v)`: the weight-graded scaling.
    pub fn scaled(&self, lambda: &S) -> Self {
        Self {
            a: lambda.clone() * self.a.clone(),
            b: self.b.clone(),
            c: lambda.clone() * self.c.clone(),
            u: lambda.clone() * self.u.clone(),
            v: lambda.clone() * lambda.clone() * self.v.clone(),
        }
    }

    fn check_liftable(&self) -> Result<()> {
        if self.v < S::zero() {
            return Err(Error::NoRealLift { v: self.v.to_string() });
        }
        if self.v.is_zero() && !(self.a.is_zero() && self.c.is_zero()) {
            return Err(Error::NotInImage { a: self.a.to_string(), c: self.c.to_string() });
        }
        Ok(())
    }

    /// Real preimage under the quotient map, `v₀ = ±√v`.
    ///
    /// At `v = a = c = 0` the lift returns `a₀ = c₀ = 0`. Exact scalars fail
    /// with [`Error::IrrationalLift`] when `v` is not a perfect square; use
    /// [`lift_algebraic`](Self::lift_algebraic) to stay exact in that case.
    pub fn lift(&self, sign: Sign) -> Result<LinearParams<S>> {
        self.check_liftable()?;
        let root = self.v.sqrt().ok_or_else(|| Error::IrrationalLift { v: self.v.to_string() })?;
        Ok(self.lift_with_root(sign.apply(root)))
    }

    /// Lift into the quadratic extension `S(√v)`; total on `v ≥ 0`.
    pub fn lift_algebraic(&self, sign: Sign) -> Result<LinearParams<Surd<S>>> {
        self.check_liftable()?;
        Ok(self.lift_unchecked(sign))
    }

    /// Formal lift with no reality check. For `v < 0` the result lives in an
    /// imaginary quadratic extension; only ring operations on it are
    /// meaningful.
    pub(crate) fn lift_unchecked(&self, sign: Sign) -> LinearParams<Surd<S>> {
        let root = sign.apply(Surd::sqrt_of(self.v.clone()));
        self.map(|x| Surd::from_base(x.clone())).lift_with_root(root)
    }

    fn lift_with_root(&self, v0: S) -> LinearParams<S> {
        if v0.is_zero() {
            return LinearParams::new(S::zero(), self.b.clone(), S::zero(), self.u.clone(), v0);
        }
        LinearParams::new(
            self.a.clone() / v0.clone(),
            self.b.clone(),
            self.c.clone() / v0.clone(),
            self.u.clone(),
            v0,
        )
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> BirationalParams<R> {
        BirationalParams { a: f(&self.a), b: f(&self.b), c: f(&self.c), u: f(&self.u), v: f(&self.v) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn theta_hat() -> StochasticParams<Rational> {
        StochasticParams::new(
            [q(-1, 8), q(9, 8)],
            [[q(3, 4), q(1, 4)], [q(1, 4), q(3, 4)]],
            [[q(3, 4), q(1, 4)], [q(1, 4), q(3, 4)]],
            &Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn identity_process_linear_coordinates() {
        let theta = StochasticParams::new(
            [q(1, 2), q(1, 2)],
            [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]],
            [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]],
            &Tolerance::default(),
        )
        .unwrap();
        let eta0 = theta.to_linear();
        assert_eq!(eta0, LinearParams::new(q(0, 1), q(1, 1), q(0, 1), q(1, 2), q(1, 2)));
        assert_eq!(eta0.to_stochastic(), theta);
    }

    #[test]
    fn theta_hat_linear_coordinates() {
        // E₁₁ = u + v₀ = 3/4 and E₀₁ = u − v₀ = 1/4 force v₀ = +1/4.
        let eta0 = theta_hat().to_linear();
        assert_eq!(eta0, LinearParams::new(q(5, 4), q(1, 2), q(0, 1), q(1, 2), q(1, 4)));
        assert_eq!(eta0.to_stochastic(), theta_hat());
        assert!(!theta_hat().is_stochastic());
    }

    #[test]
    fn zeroed_asymmetries() {
        let b = q(1, 3);
        let u = q(2, 5);
        let theta = LinearParams::new(q(0, 1), b.clone(), q(0, 1), u.clone(), q(0, 1)).to_stochastic();
        let one = q(1, 1);
        let h = q(1, 2);
        assert_eq!(theta.pi(), &[h.clone(), h.clone()]);
        assert_eq!(
            theta.transition(),
            &[
                [(one.clone() + b.clone()) * h.clone(), (one.clone() - b.clone()) * h.clone()],
                [(one.clone() - b.clone()) * h.clone(), (one.clone() + b) * h]
            ]
        );
        assert_eq!(theta.emission(), &[[one.clone() - u.clone(), u.clone()], [one - u.clone(), u]]);
    }

    #[test]
    fn swap_of_theta_hat_is_displayed_swapped_point() {
        let swapped = theta_hat().swap();
        assert_eq!(swapped.pi(), &[q(9, 8), q(-1, 8)]);
        assert_eq!(swapped.transition(), theta_hat().transition());
        assert_eq!(swapped.emission(), &[[q(1, 4), q(3, 4)], [q(3, 4), q(1, 4)]]);
        assert_eq!(swapped.swap(), theta_hat());
        assert_eq!(swapped.to_linear(), theta_hat().to_linear().swap());
    }

    #[test]
    fn q_map_examples() {
        let eta0 = LinearParams::new(q(5, 4), q(1, 2), q(0, 1), q(1, 2), q(1, 4));
        assert_eq!(eta0.q_map(), BirationalParams::new(q(5, 16), q(1, 2), q(0, 1), q(1, 2), q(1, 16)));
        assert_eq!(eta0.q_map(), eta0.swap().q_map());
        let degenerate = LinearParams::new(q(3, 7), q(1, 2), q(-1, 5), q(1, 3), q(0, 1));
        assert_eq!(degenerate.q_map(), BirationalParams::new(q(0, 1), q(1, 2), q(0, 1), q(1, 3), q(0, 1)));
    }

    #[test]
    fn lift_examples() {
        let eta = BirationalParams::new(q(5, 16), q(1, 2), q(0, 1), q(1, 2), q(1, 16));
        assert_eq!(eta.lift(Sign::Plus).unwrap(), LinearParams::new(q(5, 4), q(1, 2), q(0, 1), q(1, 2), q(1, 4)));
        assert_eq!(eta.lift(Sign::Minus).unwrap(), eta.lift(Sign::Plus).unwrap().swap());
        assert_eq!(eta.lift(Sign::Plus).unwrap().to_stochastic(), theta_hat());

        let biid = BirationalParams::new(q(0, 1), q(1, 3), q(0, 1), q(1, 2), q(0, 1));
        assert_eq!(biid.lift(Sign::Plus).unwrap(), LinearParams::new(q(0, 1), q(1, 3), q(0, 1), q(1, 2), q(0, 1)));
    }

    #[test]
    fn lift_errors() {
        let negative = BirationalParams::new(q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(-1, 4));
        assert!(matches!(negative.lift(Sign::Plus), Err(Error::NoRealLift { .. })));
        let off_image = BirationalParams::new(q(1, 4), q(0, 1), q(0, 1), q(0, 1), q(0, 1));
        assert!(matches!(off_image.lift(Sign::Plus), Err(Error::NotInImage { .. })));
        let irrational = BirationalParams::new(q(1, 4), q(0, 1), q(0, 1), q(0, 1), q(2, 1));
        assert!(matches!(irrational.lift(Sign::Plus), Err(Error::IrrationalLift { .. })));
        let lifted = irrational.lift_algebraic(Sign::Plus).unwrap();
        assert_eq!(lifted.q_map().map(|x| x.to_base().unwrap()), irrational);
    }

    #[test]
    fn malformed_rows_rejected() {
        let err = StochasticParams::new(
            [q(1, 2), q(1, 3)],
            [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]],
            [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]],
            &Tolerance::default(),
        );
        assert!(matches!(err, Err(Error::MalformedParameters(_))));
        let ok = StochasticParams::new(
            [0.5, 0.5 + 1e-12],
            [[1.0, 0.0], [0.0, 1.0]],
            [[1.0, 0.0], [0.0, 1.0]],
            &Tolerance::default(),
        );
        assert!(ok.is_ok());
    }
}
