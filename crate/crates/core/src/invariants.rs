//! Polynomial invariants of the model and the weight grading.
//!
//! Each invariant is evaluated as an explicit list of monomial terms so that
//! float-mode zero tests can be made relative to the largest term.

use crate::coords::{CoordSystem, Distribution};
use crate::error::{Error, Result};
use crate::params::BirationalParams;
use crate::scalar::{Scalar, Tolerance};

/// A value together with the magnitude of its largest monomial term.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<S> {
    pub value: S,
    pub scale: f64,
}

impl<S: Scalar> Evaluation<S> {
    fn from_terms(terms: Vec<S>) -> Self {
        let scale = terms.iter().map(|t| t.to_f64().abs()).fold(0.0, f64::max);
        let value = terms.into_iter().fold(S::zero(), |acc, t| acc + t);
        Self { value, scale }
    }

    pub fn vanishes(&self, tol: &Tolerance) -> bool {
        tol.vanishes(&self.value, self.scale)
    }
}

fn det3_terms<S: Scalar>(r: [&[S; 3]; 3]) -> Vec<S> {
    let e = |i: usize, j: usize| r[i][j].clone();
    vec![
        e(0, 0) * e(1, 1) * e(2, 2),
        e(0, 1) * e(1, 2) * e(2, 0),
        e(0, 2) * e(1, 0) * e(2, 1),
        -(e(0, 2) * e(1, 1) * e(2, 0)),
        -(e(0, 0) * e(1, 2) * e(2, 1)),
        -(e(0, 1) * e(1, 0) * e(2, 2)),
    ]
}

/// The four maximal minors of a 4×3 matrix; minor `i` deletes row `i`.
fn maximal_minors<S: Scalar>(rows: &[[S; 3]; 4]) -> Vec<Evaluation<S>> {
    (0..4)
        .map(|skip| {
            let kept: Vec<&[S; 3]> = rows.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r).collect();
            Evaluation::from_terms(det3_terms([kept[0], kept[1], kept[2]]))
        })
        .collect()
}

fn expect_nodes<S: Scalar>(d: &Distribution<S>, system: CoordSystem, n: usize) -> Result<()> {
    d.expect_system(system)?;
    if d.n() != n {
        return Err(Error::OutOfRange(format!("expected a distribution on {n} nodes, got {}", d.n())));
    }
    Ok(())
}

/// The probability-coordinate matrix whose 3×3 minors cut out the model's
/// Zariski closure on three nodes:
///
/// ```text
/// p000+p001  p000  p100
/// p010+p011  p001  p101
/// p100+p101  p010  p110
/// p110+p111  p011  p111
/// ```
pub fn hankel_matrix_prob<S: Scalar>(p: &Distribution<S>) -> Result<[[S; 3]; 4]> {
    expect_nodes(p, CoordSystem::Probability, 3)?;
    let x = |i: usize| p.get(i).clone();
    Ok([
        [x(0) + x(1), x(0), x(4)],
        [x(2) + x(3), x(1), x(5)],
        [x(4) + x(5), x(2), x(6)],
        [x(6) + x(7), x(3), x(7)],
    ])
}

/// The same ideal in moment coordinates:
///
/// ```text
/// m∅   m∅   m1
/// m2   m3   m13
/// m1   m2   m12
/// m12  m23  m123
/// ```
pub fn hankel_matrix_moment<S: Scalar>(m: &Distribution<S>) -> Result<[[S; 3]; 4]> {
    expect_nodes(m, CoordSystem::Moment, 3)?;
    let x = |nodes: &[usize]| m.at(nodes).clone();
    Ok([
        [x(&[]), x(&[]), x(&[1])],
        [x(&[2]), x(&[3]), x(&[1, 3])],
        [x(&[1]), x(&[2]), x(&[1, 2])],
        [x(&[1, 2]), x(&[2, 3]), x(&[1, 2, 3])],
    ])
}

pub fn hankel_minors_prob<S: Scalar>(p: &Distribution<S>) -> Result<Vec<Evaluation<S>>> {
    Ok(maximal_minors(&hankel_matrix_prob(p)?))
}

pub fn hankel_minors_moment<S: Scalar>(m: &Distribution<S>) -> Result<Vec<Evaluation<S>>> {
    Ok(maximal_minors(&hankel_matrix_moment(m)?))
}

fn window4<S: Scalar>(m: &Distribution<S>, offset: usize) -> Result<Distribution<S>> {
    m.expect_system(CoordSystem::Moment)?;
    if m.n() < 4 {
        return Err(Error::OutOfRange(format!("four-node invariants need n ≥ 4, got {}", m.n())));
    }
    m.window(offset, 4)
}

/// `g₂,₁ = m₂₃m₁₃ − m₂m₁₃₄ − m₁₃m₁₂ + m₁m₁₂₄` on the four nodes starting
/// after `offset`.
pub fn g21<S: Scalar>(m: &Distribution<S>, offset: usize) -> Result<Evaluation<S>> {
    let w = window4(m, offset)?;
    let x = |nodes: &[usize]| w.at(nodes).clone();
    Ok(Evaluation::from_terms(vec![
        x(&[2, 3]) * x(&[1, 3]),
        -(x(&[2]) * x(&[1, 3, 4])),
        -(x(&[1, 3]) * x(&[1, 2])),
        x(&[1]) * x(&[1, 2, 4]),
    ]))
}

/// `g₃,₁ = m₁₂³ − 2m₁m₁₂m₁₂₃ + m∅m₁₂₃² + m₁²m₁₂₃₄ − m∅m₁₂m₁₂₃₄`.
pub fn g31<S: Scalar>(m: &Distribution<S>, offset: usize) -> Result<Evaluation<S>> {
    let w = window4(m, offset)?;
    let x = |nodes: &[usize]| w.at(nodes).clone();
    let (e, m1, m12, m123, m1234) = (x(&[]), x(&[1]), x(&[1, 2]), x(&[1, 2, 3]), x(&[1, 2, 3, 4]));
    Ok(Evaluation::from_terms(vec![
        m12.powi(3),
        -(S::from_int(2) * m1.clone() * m12.clone() * m123.clone()),
        e.clone() * m123.clone() * m123,
        m1.clone() * m1 * m1234.clone(),
        -(e * m12 * m1234),
    ]))
}

/// Necessary conditions for the equilibrium submodel on the first three
/// nodes: `(m₁ − m₂, m₂ − m₃, m₁₂ − m₂₃)`.
///
/// Stationarity makes the process shift-invariant, which forces these
/// differences to vanish. `m₁₂ − m₁₃` does not vanish in general: on
/// equilibrium images it equals `b(b − 1)(a² − v)`.
pub fn ebhmm_ideal_check<S: Scalar>(m: &Distribution<S>) -> Result<[Evaluation<S>; 3]> {
    m.expect_system(CoordSystem::Moment)?;
    if m.n() < 3 {
        return Err(Error::OutOfRange(format!("equilibrium check needs n ≥ 3, got {}", m.n())));
    }
    let x = |nodes: &[usize]| m.at(nodes).clone();
    let diff = |p: S, q: S| Evaluation::from_terms(vec![p, -q]);
    Ok([diff(x(&[1]), x(&[2])), diff(x(&[2]), x(&[3])), diff(x(&[1, 2]), x(&[2, 3]))])
}

/// Weighted degree of `a^i b^j c^k u^l v^m` with weights `(1, 0, 1, 1, 2)`.
pub fn weighted_degree(exponents: [u32; 5]) -> u32 {
    let [a, _b, c, u, v] = exponents;
    a + c + u + 2 * v
}

/// Tests `f(λ·η)_I = λ^{|I|} f(η)_I` for `λ ∈ {2, 3}`, where `λ·η` is the
/// weighted scaling `(λa, b, λc, λu, λ²v)`.
pub fn check_homogeneous<S, F>(f: F, eta: &BirationalParams<S>) -> Result<bool>
where
    S: Scalar,
    F: Fn(&BirationalParams<S>) -> Result<Distribution<S>>,
{
    let base = f(eta)?;
    for lambda in [2, 3] {
        let lambda = S::from_int(lambda);
        let scaled = f(&eta.scaled(&lambda))?;
        let ok = base
            .values()
            .iter()
            .zip(scaled.values())
            .enumerate()
            .all(|(idx, (x, y))| lambda.powi(idx.count_ones()) * x.clone() == *y);
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantSet {
    /// 3×3 minors of both Hankel matrices on every 3-node window.
    Hankel3,
    /// `g₂,₁` and `g₃,₁` on every 4-node window.
    Bhmm4,
    /// Equilibrium conditions on the first three nodes.
    Ebhmm3,
    All,
}

impl InvariantSet {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hankel3" => Ok(Self::Hankel3),
            "bhmm4" => Ok(Self::Bhmm4),
            "ebhmm3" => Ok(Self::Ebhmm3),
            "all" => Ok(Self::All),
            other => Err(Error::Parse(format!("unknown invariant set '{other}'"))),
        }
    }

    fn includes(self, other: Self) -> bool {
        self == Self::All || self == other
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue<S> {
    pub name: String,
    pub offset: usize,
    pub value: S,
    pub scale: f64,
    pub vanished: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport<S> {
    pub values: Vec<InvariantValue<S>>,
    pub all_vanish: bool,
    pub max_abs: f64,
}

impl<S: Scalar> InvariantReport<S> {
    fn push(&mut self, name: String, offset: usize, e: Evaluation<S>, tol: &Tolerance) {
        let vanished = e.vanishes(tol);
        self.all_vanish &= vanished;
        self.max_abs = self.max_abs.max(e.value.to_f64().abs());
        self.values.push(InvariantValue { name, offset, value: e.value, scale: e.scale, vanished });
    }
}

/// Evaluates an invariant family on a distribution in any coordinates.
///
/// `windows` restricts the window offsets; `None` means every offset that
/// fits. Offsets that do not fit a family are skipped for that family.
pub fn evaluate<S: Scalar>(
    d: &Distribution<S>,
    set: InvariantSet,
    windows: Option<&[usize]>,
    tol: &Tolerance,
) -> Result<InvariantReport<S>> {
    let m = d.convert(CoordSystem::Moment, tol)?;
    let n = m.n();
    let offsets = |width: usize| -> Vec<usize> {
        let last = n.saturating_sub(width);
        match windows {
            None if n >= width => (0..=last).collect(),
            None => Vec::new(),
            Some(list) => list.iter().copied().filter(|&o| n >= width && o <= last).collect(),
        }
    };
    let mut report = InvariantReport { values: Vec::new(), all_vanish: true, max_abs: 0.0 };
    if set.includes(InvariantSet::Hankel3) {
        for offset in offsets(3) {
            let w = m.window(offset, 3)?;
            for (i, e) in hankel_minors_moment(&w)?.into_iter().enumerate() {
                report.push(format!("hankel_moment[{i}]"), offset, e, tol);
            }
            let p = w.moment_to_prob(tol)?;
            for (i, e) in hankel_minors_prob(&p)?.into_iter().enumerate() {
                report.push(format!("hankel_prob[{i}]"), offset, e, tol);
            }
        }
    }
    if set.includes(InvariantSet::Bhmm4) {
        for offset in offsets(4) {
            report.push("g21".into(), offset, g21(&m, offset)?, tol);
            report.push("g31".into(), offset, g31(&m, offset)?, tol);
        }
    }
    if set.includes(InvariantSet::Ebhmm3) && n >= 3 {
        let names = ["m1-m2", "m2-m3", "m12-m23"];
        for (name, e) in names.into_iter().zip(ebhmm_ideal_check(&m)?) {
            report.push(name.into(), 0, e, tol);
        }
    }
    Ok(report)
}
