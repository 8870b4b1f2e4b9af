//! Inverse parametrization from observed moments.
//!
//! Every recovery reads only the moments on the first three nodes, so it
//! applies to distributions on any `n ≥ 3` nodes. [`classify`] walks the
//! strata from the most generic down and accepts the first candidate whose
//! full forward image reproduces the input.

use std::fmt;

use crate::coords::{CoordSystem, Distribution};
use crate::error::{Error, Result};
use crate::forward::psi_n_formal;
use crate::params::{BirationalParams, Sign};
use crate::scalar::{Scalar, Tolerance};

/// The seven non-trivial moments on nodes `{1, 2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window3<S> {
    pub m1: S,
    pub m2: S,
    pub m3: S,
    pub m12: S,
    pub m13: S,
    pub m23: S,
    pub m123: S,
}

impl<S: Scalar> Window3<S> {
    pub fn new(m: &Distribution<S>) -> Result<Self> {
        m.expect_system(CoordSystem::Moment)?;
        if m.n() < 3 {
            return Err(Error::OutOfRange(format!("recovery needs at least 3 nodes, got {}", m.n())));
        }
        Ok(Self {
            m1: m.at(&[1]).clone(),
            m2: m.at(&[2]).clone(),
            m3: m.at(&[3]).clone(),
            m12: m.at(&[1, 2]).clone(),
            m13: m.at(&[1, 3]).clone(),
            m23: m.at(&[2, 3]).clone(),
            m123: m.at(&[1, 2, 3]).clone(),
        })
    }
}

/// A recovery denominator, its value, and whether it counted as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard<S> {
    pub name: &'static str,
    pub value: S,
    pub vanished: bool,
}

impl<S: Scalar> Guard<S> {
    fn check(name: &'static str, den: S, num: &S, tol: &Tolerance) -> Self {
        let vanished = tol.guard_vanishes(&den, num);
        Self { name, value: den, vanished }
    }

    fn into_result(self) -> Result<S> {
        if self.vanished {
            Err(Error::GuardVanished { guard: self.name, value: self.value.to_string() })
        } else {
            Ok(self.value)
        }
    }

    /// A float guard that tripped without being exactly zero.
    pub fn near_degenerate(&self) -> bool {
        self.vanished && !self.value.is_zero()
    }
}

/// Triangular solve for `(a, b, c, u, v)`, recording each guard as it is
/// evaluated. Stops at the first vanishing guard.
fn generic_guarded<S: Scalar>(w: &Window3<S>, tol: &Tolerance, guards: &mut Vec<Guard<S>>) -> Option<BirationalParams<S>> {
    let two = S::from_int(2);
    let d32 = w.m3.clone() - w.m2.clone();
    let d21 = w.m2.clone() - w.m1.clone();
    let u_num = w.m1.clone() * w.m3.clone() - w.m2.clone() * w.m2.clone() + w.m23.clone() - w.m12.clone();
    let g = Guard::check("m3-m2", d32.clone(), &u_num, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let g = Guard::check("m2-m1", d21.clone(), &d32, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let b = d32.clone() / d21.clone();
    let v_num = w.m1.clone() * w.m2.clone() - w.m12.clone();
    let g = Guard::check("b", b.clone(), &v_num, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let u = u_num / (two * d32);
    let a = w.m1.clone() - u.clone();
    let c = a.clone() - b.clone() * a.clone() + d21;
    let v = a.clone() * a.clone() - v_num / b.clone();
    Some(BirationalParams::new(a, b, c, u, v))
}

/// Generic recovery of `(a, b, c, u, v)` from moments on `n ≥ 3` nodes:
///
/// ```text
/// b = (m₃−m₂)/(m₂−m₁)
/// u = (m₁m₃ − m₂² + m₂₃ − m₁₂) / (2(m₃−m₂))
/// a = m₁ − u
/// c = a − ba + m₂ − m₁
/// v = a² − (m₁m₂ − m₁₂)/b
/// ```
pub fn recover_generic<S: Scalar>(m: &Distribution<S>, tol: &Tolerance) -> Result<BirationalParams<S>> {
    let w = Window3::new(m)?;
    let mut guards = Vec::new();
    generic_guarded(&w, tol, &mut guards).ok_or_else(|| {
        let g = guards.pop().expect("a guard was recorded");
        Error::GuardVanished { guard: g.name, value: g.value.to_string() }
    })
}

/// The same inverse written as closed-form rational functions of the
/// moments. Agrees with [`recover_generic`] wherever both are defined.
pub fn rho3<S: Scalar>(m: &Distribution<S>, tol: &Tolerance) -> Result<BirationalParams<S>> {
    let Window3 { m1, m2, m3, m12, m13: _, m23, m123: _ } = Window3::new(m)?;
    let i = |k: i64| S::from_int(k);
    let d32 = m3.clone() - m2.clone();
    let d21 = m2.clone() - m1.clone();
    let a_num = m2.clone() * m2.clone() + m3.clone() * m1.clone() - i(2) * m2.clone() * m1.clone() - m23.clone()
        + m12.clone();
    let d32 = Guard::check("m3-m2", d32, &a_num, tol).into_result()?;
    let d21 = Guard::check("m2-m1", d21, &d32, tol).into_result()?;
    let a = a_num / (i(2) * d32.clone());
    let b = d32.clone() / d21.clone();
    let u = (m3.clone() * m1.clone() - m2.clone() * m2.clone() + m23.clone() - m12.clone()) / (i(2) * d32.clone());
    let c_num = -(m1.clone() * m2.clone() * m2.clone()) + m1.clone() * m1.clone() * m3.clone()
        + m2.clone() * m2.clone() * m3.clone()
        - m1.clone() * m3.clone() * m3.clone()
        - m1.clone() * m12.clone()
        + i(2) * m2.clone() * m12.clone()
        - m3.clone() * m12.clone()
        + m1.clone() * m23.clone()
        - i(2) * m2.clone() * m23.clone()
        + m3.clone() * m23.clone();
    let c = c_num / (i(2) * d21 * d32.clone());
    let v_num = m2.powi(4) - i(2) * m1.clone() * m2.clone() * m2.clone() * m3.clone()
        + m1.clone() * m1.clone() * m3.clone() * m3.clone()
        - i(2) * m2.clone() * m2.clone() * m12.clone()
        - i(2) * m1.clone() * m3.clone() * m12.clone()
        + i(4) * m2.clone() * m3.clone() * m12.clone()
        + i(4) * m1.clone() * m2.clone() * m23.clone()
        - i(2) * m2.clone() * m2.clone() * m23.clone()
        - i(2) * m1.clone() * m3.clone() * m23.clone()
        + m12.clone() * m12.clone()
        - i(2) * m12 * m23.clone()
        + m23.clone() * m23;
    let v = v_num / (i(4) * d32.clone() * d32);
    Ok(BirationalParams::new(a, b, c, u, v))
}

/// Parameters of the equilibrium submodel, where `π` is stationary for `T`.
/// There `c₀ = a₀(1 − b)`, so `c = a(1 − b)` is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumParams<S> {
    pub a: S,
    pub b: S,
    pub u: S,
    pub v: S,
}

impl<S: Scalar> EquilibriumParams<S> {
    pub fn to_birational(&self) -> BirationalParams<S> {
        let c = self.a.clone() * (S::one() - self.b.clone());
        BirationalParams::new(self.a.clone(), self.b.clone(), c, self.u.clone(), self.v.clone())
    }
}

fn equilibrium_guarded<S: Scalar>(
    w: &Window3<S>,
    tol: &Tolerance,
    guards: &mut Vec<Guard<S>>,
) -> Option<EquilibriumParams<S>> {
    let sq = w.m1.clone() * w.m1.clone();
    let d12 = sq.clone() - w.m12.clone();
    let d13 = sq.clone() - w.m13.clone();
    let g = Guard::check("m1^2-m12", d12.clone(), &d13, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let u_num = S::from_int(2) * w.m1.clone() * w.m12.clone() - w.m1.clone() * w.m13.clone() - w.m123.clone();
    let g = Guard::check("m1^2-m13", d13.clone(), &u_num, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let b = d13.clone() / d12;
    let u = u_num / (S::from_int(2) * d13);
    let a = w.m1.clone() - u.clone();
    let v_num = a.clone() * a.clone() * b.clone() - sq + w.m12.clone();
    let g = Guard::check("b", b.clone(), &v_num, tol);
    let ok = !g.vanished;
    guards.push(g);
    if !ok {
        return None;
    }
    let v = v_num / b.clone();
    Some(EquilibriumParams { a, b, u, v })
}

/// Recovery on the equilibrium submodel:
///
/// ```text
/// b = (m₁² − m₁₃)/(m₁² − m₁₂)
/// u = (2m₁m₁₂ − m₁m₁₃ − m₁₂₃) / (2(m₁² − m₁₃))
/// a = m₁ − u
/// v = (a²b − m₁² + m₁₂)/b
/// ```
pub fn recover_equilibrium<S: Scalar>(m: &Distribution<S>, tol: &Tolerance) -> Result<EquilibriumParams<S>> {
    let w = Window3::new(m)?;
    let mut guards = Vec::new();
    equilibrium_guarded(&w, tol, &mut guards).ok_or_else(|| {
        let g = guards.pop().expect("a guard was recorded");
        Error::GuardVanished { guard: g.name, value: g.value.to_string() }
    })
}

/// Independent, non-identically distributed: the first symbol is a coin with
/// bias `α`, every later symbol a coin with bias `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinidParams<S> {
    pub alpha: S,
    pub beta: S,
}

/// `α = m₁`, `β = m₂`.
pub fn recover_binid<S: Scalar>(m: &Distribution<S>) -> Result<BinidParams<S>> {
    let w = Window3::new(m)?;
    Ok(BinidParams { alpha: w.m1, beta: w.m2 })
}

/// `u = m₁`.
pub fn recover_biid<S: Scalar>(m: &Distribution<S>) -> Result<S> {
    Ok(Window3::new(m)?.m1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stratum {
    Generic,
    Equilibrium,
    Binid,
    Biid,
    Undetermined,
}

impl Stratum {
    pub fn name(self) -> &'static str {
        match self {
            Stratum::Generic => "generic",
            Stratum::Equilibrium => "equilibrium",
            Stratum::Binid => "binid",
            Stratum::Biid => "biid",
            Stratum::Undetermined => "undetermined",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "generic" => Ok(Stratum::Generic),
            "equilibrium" | "ebhmm" => Ok(Stratum::Equilibrium),
            "binid" => Ok(Stratum::Binid),
            "biid" => Ok(Stratum::Biid),
            other => Err(Error::Parse(format!("unknown stratum '{other}'"))),
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StratumParams<S> {
    Generic(BirationalParams<S>),
    Equilibrium(EquilibriumParams<S>),
    Binid(BinidParams<S>),
    Biid { u: S },
}

impl<S: Scalar> StratumParams<S> {
    pub fn stratum(&self) -> Stratum {
        match self {
            StratumParams::Generic(_) => Stratum::Generic,
            StratumParams::Equilibrium(_) => Stratum::Equilibrium,
            StratumParams::Binid(_) => Stratum::Binid,
            StratumParams::Biid { .. } => Stratum::Biid,
        }
    }

    /// Moments on `n` nodes of the process these parameters describe.
    ///
    /// Generic and equilibrium parameters are evaluated as polynomials, so a
    /// negative `v` still yields the (non-real) model's moments.
    pub fn moments(&self, n: usize) -> Result<Distribution<S>> {
        match self {
            StratumParams::Generic(eta) => psi_n_formal(eta, n, Sign::Plus),
            StratumParams::Equilibrium(e) => psi_n_formal(&e.to_birational(), n, Sign::Plus),
            StratumParams::Binid(BinidParams { alpha, beta }) => {
                let first = 1usize << (n - 1);
                let values = (0..1usize << n)
                    .map(|idx| {
                        let rest = beta.powi((idx & !first).count_ones());
                        if idx & first != 0 {
                            alpha.clone() * rest
                        } else {
                            rest
                        }
                    })
                    .collect();
                Distribution::new(n, CoordSystem::Moment, values)
            }
            StratumParams::Biid { u } => {
                let values = (0..1usize << n).map(|idx: usize| u.powi(idx.count_ones())).collect();
                Distribution::new(n, CoordSystem::Moment, values)
            }
        }
    }
}

/// First coordinate where two distributions disagree beyond tolerance.
pub fn first_mismatch<S: Scalar>(x: &Distribution<S>, y: &Distribution<S>, tol: &Tolerance) -> Option<(usize, S, S)> {
    x.values().iter().zip(y.values()).enumerate().find(|(_, (p, q))| !tol.eq(*p, *q)).map(|(i, (p, q))| (i, p.clone(), q.clone()))
}

/// Result of stratum recovery.
///
/// `params` is present iff every guard of the reported stratum cleared.
/// `verified` records whether the forward image of `params` reproduces the
/// input on all nodes; [`classify`] only reports verified strata.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOutcome<S> {
    pub stratum: Stratum,
    pub params: Option<StratumParams<S>>,
    pub verified: bool,
    pub guards: Vec<Guard<S>>,
    /// Some float guard tripped on a value that was small but not zero.
    pub near_degenerate: bool,
    /// Candidates whose forward image did not match, with the first
    /// mismatching coordinate.
    pub rejected: Vec<(Stratum, usize)>,
}

impl<S: Scalar> RecoveryOutcome<S> {
    fn new(guards: Vec<Guard<S>>) -> Self {
        let near_degenerate = guards.iter().any(Guard::near_degenerate);
        Self { stratum: Stratum::Undetermined, params: None, verified: false, guards, near_degenerate, rejected: Vec::new() }
    }
}

fn candidate<S: Scalar>(stratum: Stratum, w: &Window3<S>, tol: &Tolerance, guards: &mut Vec<Guard<S>>) -> Option<StratumParams<S>> {
    match stratum {
        Stratum::Generic => generic_guarded(w, tol, guards).map(StratumParams::Generic),
        Stratum::Equilibrium => equilibrium_guarded(w, tol, guards).map(StratumParams::Equilibrium),
        Stratum::Binid => Some(StratumParams::Binid(BinidParams { alpha: w.m1.clone(), beta: w.m2.clone() })),
        Stratum::Biid => Some(StratumParams::Biid { u: w.m1.clone() }),
        Stratum::Undetermined => None,
    }
}

/// Recovery restricted to one stratum. The outcome carries the parameters
/// whenever the guards clear, verified or not.
pub fn recover_stratum<S: Scalar>(m: &Distribution<S>, stratum: Stratum, tol: &Tolerance) -> Result<RecoveryOutcome<S>> {
    let w = Window3::new(m)?;
    let mut guards = Vec::new();
    let params = candidate(stratum, &w, tol, &mut guards);
    let mut out = RecoveryOutcome::new(guards);
    if let Some(p) = params {
        let mismatch = first_mismatch(&p.moments(m.n())?, m, tol);
        out.stratum = stratum;
        out.verified = mismatch.is_none();
        if let Some((idx, _, _)) = mismatch {
            out.rejected.push((stratum, idx));
        }
        out.params = Some(p);
    }
    Ok(out)
}

/// Tries generic, equilibrium, BINID and BIID recovery in that order and
/// returns the first candidate whose forward image matches `m` on all
/// nodes. A verified BINID point with `α = β` is reported as BIID.
pub fn classify<S: Scalar>(m: &Distribution<S>, tol: &Tolerance) -> Result<RecoveryOutcome<S>> {
    let w = Window3::new(m)?;
    let mut guards = Vec::new();
    let mut rejected = Vec::new();
    for stratum in [Stratum::Generic, Stratum::Equilibrium, Stratum::Binid, Stratum::Biid] {
        let Some(params) = candidate(stratum, &w, tol, &mut guards) else { continue };
        match first_mismatch(&params.moments(m.n())?, m, tol) {
            Some((idx, _, _)) => rejected.push((stratum, idx)),
            None => {
                let params = match params {
                    StratumParams::Binid(BinidParams { alpha, beta }) if tol.eq(&alpha, &beta) => {
                        StratumParams::Biid { u: alpha }
                    }
                    p => p,
                };
                let mut out = RecoveryOutcome::new(guards);
                out.stratum = params.stratum();
                out.params = Some(params);
                out.verified = true;
                out.rejected = rejected;
                return Ok(out);
            }
        }
    }
    let mut out = RecoveryOutcome::new(guards);
    out.rejected = rejected;
    Ok(out)
}
