//! Observed distributions in probability, moment and cumulant coordinates.
//!
//! A distribution on `n` binary nodes is a vector of length `2ⁿ`. The
//! binary string `v₁…vₙ` sits at index `Σ v_t·2^(n−t)`, so `v₁` is the most
//! significant bit. A subset `I ⊆ {1…n}` is identified with its indicator
//! string; `m_I` is the moment at that index.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice;
use crate::scalar::{Scalar, Tolerance};

/// Largest supported node count (`2ⁿ` values are stored densely).
pub const MAX_NODES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordSystem {
    Probability,
    Moment,
    Cumulant,
}

impl CoordSystem {
    pub fn name(self) -> &'static str {
        match self {
            CoordSystem::Probability => "probability",
            CoordSystem::Moment => "moment",
            CoordSystem::Cumulant => "cumulant",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(CoordSystem::Probability),
            "moment" => Ok(CoordSystem::Moment),
            "cumulant" => Ok(CoordSystem::Cumulant),
            other => Err(Error::Parse(format!("unknown coordinate system {other:?}"))),
        }
    }
}

impl fmt::Display for CoordSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index of the subset `I ⊆ {1…n}` (1-based node labels).
pub fn subset_index(n: usize, nodes: &[usize]) -> usize {
    nodes.iter().fold(0, |acc, &t| {
        assert!((1..=n).contains(&t), "node {t} outside 1..={n}");
        acc | 1 << (n - t)
    })
}

/// Binary string of an index, `v₁` first.
pub fn index_key(n: usize, index: usize) -> String {
    (1..=n).map(|t| if index >> (n - t) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a binary string into an index.
pub fn key_index(key: &str) -> Result<usize> {
    if key.is_empty() || !key.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Parse(format!("bad binary key {key:?}")));
    }
    Ok(key.chars().fold(0, |acc, c| acc << 1 | (c == '1') as usize))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    n: usize,
    system: CoordSystem,
    values: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Checks only the shape; normalization is checked by the operations
    /// that need it.
    pub fn new(n: usize, system: CoordSystem, values: Vec<S>) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::OutOfRange(format!("node count {n} outside 1..={MAX_NODES}")));
        }
        if values.len() != 1 << n {
            return Err(Error::MalformedDistribution(format!(
                "{} values for n = {n}, expected {}",
                values.len(),
                1usize << n
            )));
        }
        Ok(Self { n, system, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> CoordSystem {
        self.system
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn get(&self, index: usize) -> &S {
        &self.values[index]
    }

    /// Coordinate of the subset `I` given by 1-based node labels.
    pub fn at(&self, nodes: &[usize]) -> &S {
        &self.values[subset_index(self.n, nodes)]
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> Distribution<R> {
        Distribution { n: self.n, system: self.system, values: self.values.iter().map(f).collect() }
    }

    pub fn expect_system(&self, expected: CoordSystem) -> Result<()> {
        if self.system == expected {
            Ok(())
        } else {
            Err(Error::WrongSystem { expected, found: self.system })
        }
    }

    /// The affine-patch normalization of the coordinate system: `Σp = 1`,
    /// `m_∅ = 1` or `k_∅ = 0`.
    pub fn check_normalized(&self, tol: &Tolerance) -> Result<()> {
        let (what, value, target) = match self.system {
            CoordSystem::Probability => ("sum of probabilities", self.values.iter().cloned().fold(S::zero(), |a, x| a + x), S::one()),
            CoordSystem::Moment => ("m_∅", self.values[0].clone(), S::one()),
            CoordSystem::Cumulant => ("k_∅", self.values[0].clone(), S::zero()),
        };
        if tol.eq(&value, &target) {
            Ok(())
        } else {
            Err(Error::MalformedDistribution(format!("{what} is {value}, expected {target}")))
        }
    }

    /// `m_v = Σ_{w ≥ v} p_w` (dominance order), an upward zeta transform.
    pub fn prob_to_moment(&self) -> Result<Self> {
        self.expect_system(CoordSystem::Probability)?;
        let mut values = self.values.clone();
        lattice::superset_zeta(&mut values);
        Ok(Self { n: self.n, system: CoordSystem::Moment, values })
    }

    /// Möbius inversion of [`prob_to_moment`](Self::prob_to_moment).
    pub fn moment_to_prob(&self, tol: &Tolerance) -> Result<Self> {
        self.expect_system(CoordSystem::Moment)?;
        self.check_normalized(tol)?;
        let mut values = self.values.clone();
        lattice::superset_mobius(&mut values);
        Ok(Self { n: self.n, system: CoordSystem::Probability, values })
    }

    /// Coefficients of `log f_m` in the square-free algebra.
    pub fn moment_to_cumulant(&self, tol: &Tolerance) -> Result<Self> {
        self.expect_system(CoordSystem::Moment)?;
        self.check_normalized(tol)?;
        let mut values = self.values.clone();
        values[0] = S::one();
        Ok(Self { n: self.n, system: CoordSystem::Cumulant, values: lattice::log(&values) })
    }

    /// Coefficients of `exp f_k` in the square-free algebra.
    pub fn cumulant_to_moment(&self, tol: &Tolerance) -> Result<Self> {
        self.expect_system(CoordSystem::Cumulant)?;
        self.check_normalized(tol)?;
        let mut values = self.values.clone();
        values[0] = S::zero();
        Ok(Self { n: self.n, system: CoordSystem::Moment, values: lattice::exp(&values) })
    }

    /// Converts to any coordinate system.
    pub fn convert(&self, target: CoordSystem, tol: &Tolerance) -> Result<Self> {
        use CoordSystem::*;
        match (self.system, target) {
            (a, b) if a == b => Ok(self.clone()),
            (Probability, Moment) => self.prob_to_moment(),
            (Probability, Cumulant) => self.prob_to_moment()?.moment_to_cumulant(tol),
            (Moment, Probability) => self.moment_to_prob(tol),
            (Moment, Cumulant) => self.moment_to_cumulant(tol),
            (Cumulant, Moment) => self.cumulant_to_moment(tol),
            (Cumulant, Probability) => self.cumulant_to_moment(tol)?.moment_to_prob(tol),
            _ => unreachable!(),
        }
    }

    /// Marginal on the first `n_target` nodes.
    ///
    /// Probabilities sum over the dropped suffix. Moments and cumulants
    /// indexed by subsets of `{1…n_target}` do not depend on the ambient
    /// node count, so both are plain projections.
    pub fn marginalize(&self, n_target: usize) -> Result<Self> {
        if n_target == 0 || n_target > self.n {
            return Err(Error::OutOfRange(format!("cannot marginalize {} nodes to {n_target}", self.n)));
        }
        let shift = self.n - n_target;
        let values = match self.system {
            CoordSystem::Probability => {
                let mut out = vec![S::zero(); 1 << n_target];
                for (idx, x) in self.values.iter().enumerate() {
                    out[idx >> shift] = out[idx >> shift].clone() + x.clone();
                }
                out
            }
            CoordSystem::Moment | CoordSystem::Cumulant => {
                (0..1usize << n_target).map(|idx| self.values[idx << shift].clone()).collect()
            }
        };
        Ok(Self { n: n_target, system: self.system, values })
    }

    /// Moments on the contiguous nodes `offset+1 … offset+width`, relabeled
    /// `1 … width`.
    ///
    /// For the image of a process `(π, T, E)` this is the image of
    /// `(πT^offset, T, E)` on `width` nodes.
    pub fn window(&self, offset: usize, width: usize) -> Result<Self> {
        self.expect_system(CoordSystem::Moment)?;
        if width == 0 || offset + width > self.n {
            return Err(Error::OutOfRange(format!(
                "window offset {offset} width {width} does not fit in {} nodes",
                self.n
            )));
        }
        let shift = self.n - offset - width;
        let values = (0..1usize << width).map(|idx| self.values[idx << shift].clone()).collect();
        Ok(Self { n: width, system: CoordSystem::Moment, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn prob(n: usize, raw: &[i64]) -> Distribution<Rational> {
        let total: i64 = raw.iter().sum();
        Distribution::new(n, CoordSystem::Probability, raw.iter().map(|&x| q(x, total)).collect()).unwrap()
    }

    #[test]
    fn index_conventions() {
        assert_eq!(subset_index(4, &[2, 4]), 0b0101);
        assert_eq!(index_key(4, 0b0101), "0101");
        assert_eq!(key_index("0101").unwrap(), 5);
        assert!(key_index("01a").is_err());
        assert!(key_index("").is_err());
    }

    #[test]
    fn uniform_moments_are_powers_of_half() {
        for n in 1..=5 {
            let p = Distribution::new(n, CoordSystem::Probability, vec![q(1, 1 << n); 1 << n]).unwrap();
            let m = p.prob_to_moment().unwrap();
            for (idx, x) in m.values().iter().enumerate() {
                assert_eq!(*x, q(1, 1 << idx.count_ones()));
            }
            assert_eq!(m.moment_to_prob(&tol()).unwrap(), p);
        }
    }

    #[test]
    fn two_node_moments() {
        let p = prob(2, &[1, 2, 3, 4]);
        let m = p.prob_to_moment().unwrap();
        assert_eq!(*m.at(&[]), q(1, 1));
        assert_eq!(*m.at(&[1]), p.get(0b10).clone() + p.get(0b11).clone());
        assert_eq!(*m.at(&[2]), p.get(0b01).clone() + p.get(0b11).clone());
        assert_eq!(*m.at(&[1, 2]), p.get(0b11).clone());
    }

    #[test]
    fn five_node_dominance_pattern() {
        // m_{10010} = p_{1++1+}
        let raw: Vec<i64> = (1..=32).collect();
        let p = prob(5, &raw);
        let m = p.prob_to_moment().unwrap();
        let expected: Rational = (0..32).filter(|i| i & 0b10010 == 0b10010).map(|i| p.get(i).clone()).sum();
        assert_eq!(*m.get(0b10010), expected);
    }

    #[test]
    fn independent_moments_have_no_mixed_cumulants() {
        let mu = [q(1, 3), q(2, 5), q(3, 7)];
        let values: Vec<Rational> = (0..8usize)
            .map(|idx| (1..=3).filter(|t| idx >> (3 - t) & 1 == 1).map(|t| mu[t - 1].clone()).product())
            .collect();
        let m = Distribution::new(3, CoordSystem::Moment, values).unwrap();
        let k = m.moment_to_cumulant(&tol()).unwrap();
        for (idx, x) in k.values().iter().enumerate() {
            match idx.count_ones() {
                0 => assert_eq!(*x, q(0, 1)),
                1 => assert_eq!(*x, mu[3 - 1 - idx.trailing_zeros() as usize]),
                _ => assert_eq!(*x, q(0, 1)),
            }
        }
        assert_eq!(k.cumulant_to_moment(&tol()).unwrap(), m);
    }

    #[test]
    fn two_node_cumulant_is_covariance() {
        let m = prob(2, &[3, 1, 4, 2]).prob_to_moment().unwrap();
        let k = m.moment_to_cumulant(&tol()).unwrap();
        assert_eq!(*k.at(&[1, 2]), m.at(&[1, 2]).clone() - m.at(&[1]).clone() * m.at(&[2]).clone());
        assert_eq!(*k.at(&[1]), m.at(&[1]).clone());
    }

    #[test]
    fn wrong_system_and_normalization_errors() {
        let p = prob(2, &[1, 1, 1, 1]);
        assert!(matches!(p.moment_to_prob(&tol()), Err(Error::WrongSystem { .. })));
        let bad = Distribution::new(2, CoordSystem::Moment, vec![q(2, 1), q(0, 1), q(0, 1), q(0, 1)]).unwrap();
        assert!(matches!(bad.moment_to_cumulant(&tol()), Err(Error::MalformedDistribution(_))));
        assert!(matches!(bad.moment_to_prob(&tol()), Err(Error::MalformedDistribution(_))));
        let badk = Distribution::new(1, CoordSystem::Cumulant, vec![q(1, 2), q(0, 1)]).unwrap();
        assert!(badk.cumulant_to_moment(&tol()).is_err());
        assert!(Distribution::new(2, CoordSystem::Moment, vec![q(1, 1)]).is_err());
        assert!(Distribution::<Rational>::new(0, CoordSystem::Moment, vec![q(1, 1)]).is_err());
    }

    #[test]
    fn marginalize_probability_and_moment() {
        let p = prob(2, &[1, 2, 3, 4]);
        let p1 = p.marginalize(1).unwrap();
        assert_eq!(p1.values(), &[q(3, 10), q(7, 10)]);
        let m = p.prob_to_moment().unwrap();
        assert_eq!(m.marginalize(1).unwrap(), p1.prob_to_moment().unwrap());
        assert!(p.marginalize(3).is_err());
        assert!(p.marginalize(0).is_err());
    }

    #[test]
    fn marginalize_cumulant_projection_matches_round_trip() {
        let raw: Vec<i64> = (0..16).map(|i| (i * 5) % 7 + 1).collect();
        let k = prob(4, &raw).convert(CoordSystem::Cumulant, &tol()).unwrap();
        let via_moments = k
            .cumulant_to_moment(&tol())
            .unwrap()
            .marginalize(2)
            .unwrap()
            .moment_to_cumulant(&tol())
            .unwrap();
        assert_eq!(k.marginalize(2).unwrap(), via_moments);
    }

    #[test]
    fn window_at_zero_is_marginal_and_composes() {
        let raw: Vec<i64> = (0..32).map(|i| (i * 3) % 11 + 1).collect();
        let m = prob(5, &raw).prob_to_moment().unwrap();
        assert_eq!(m.window(0, 3).unwrap(), m.marginalize(3).unwrap());
        assert_eq!(m.window(1, 3).unwrap().window(1, 2).unwrap(), m.window(2, 2).unwrap());
        assert_eq!(*m.window(2, 3).unwrap().at(&[1, 3]), *m.at(&[3, 5]));
        assert!(m.window(3, 3).is_err());
        assert!(prob(2, &[1, 1, 1, 1]).window(0, 1).is_err());
    }
}
