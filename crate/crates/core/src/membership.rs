//! Deciding whether a distribution lies in the model, with a certificate.
//!
//! Acceptance carries a stochastic parameter point whose forward image
//! reproduces the input on every node. Rejection names a necessary
//! condition that fails.
//!
//! Only the `+` lift of `v₀` is checked for stochasticity. The swap acts on
//! `(π, T, E)` by permuting entries, so the two lifts are stochastic
//! together or not at all.

use crate::coords::{index_key, CoordSystem, Distribution};
use crate::error::{Error, Result};
use crate::forward::phi_baum;
use crate::params::{BirationalParams, Sign, StochasticParams};
use crate::recover::{
    first_mismatch, BinidParams, EquilibriumParams, Guard, RecoveryOutcome, Stratum, StratumParams, Window3,
};
use crate::scalar::{Scalar, Surd, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    InModel,
    NotInModel,
    InSubmodel,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::InModel => "in_model",
            Verdict::NotInModel => "not_in_model",
            Verdict::InSubmodel => "in_submodel",
        }
    }
}

/// One failed submodel candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub stratum: Stratum,
    pub reason: String,
}

/// Why a distribution was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<S: Scalar> {
    /// The recovered `v` is negative, so `v₀ = √v` is not real.
    NegativeV { v: S },
    /// A recovered parameter lies outside `[0, 1]`.
    NonStochasticEntry { entry: String, value: Surd<S> },
    /// The forward image of the recovered parameters differs from the input
    /// at probability coordinate `index`.
    ForwardMismatch { index: usize, key: String, expected: Surd<S>, found: Surd<S> },
    /// Recovery left the generic stratum (or recovered `v = 0`) and no
    /// submodel produced a stochastic parameter point reproducing the input.
    /// On model points a vanishing guard forces membership in one of the
    /// three submodels, so exhausting them rules the point out.
    Exhausted { attempts: Vec<Attempt> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate<S: Scalar> {
    pub verdict: Verdict,
    /// The accepted parameter point (one lift) on acceptance; on rejection
    /// after a successful generic recovery, the offending real point.
    pub theta: Option<StochasticParams<Surd<S>>>,
    pub stratum: Option<Stratum>,
    /// Recovered `(a, b, c, u, v)` when the generic guards cleared.
    pub eta: Option<BirationalParams<S>>,
    /// Submodel parameters on [`Verdict::InSubmodel`].
    pub submodel: Option<StratumParams<S>>,
    pub witness: Option<Witness<S>>,
    pub guards: Vec<Guard<S>>,
    pub near_degenerate: bool,
}

impl<S: Scalar> MembershipCertificate<S> {
    fn new(verdict: Verdict, guards: Vec<Guard<S>>) -> Self {
        let near_degenerate = guards.iter().any(Guard::near_degenerate);
        Self { verdict, theta: None, stratum: None, eta: None, submodel: None, witness: None, guards, near_degenerate }
    }

    pub fn accepted(&self) -> bool {
        self.verdict != Verdict::NotInModel
    }
}

/// Input validation shared by [`membership_test`] and [`fiber`].
fn validate<S: Scalar>(p: &Distribution<S>, tol: &Tolerance) -> Result<Distribution<S>> {
    p.expect_system(CoordSystem::Probability)?;
    if p.n() < 3 {
        return Err(Error::OutOfRange(format!("membership needs at least 3 nodes, got {}", p.n())));
    }
    if let Some((idx, x)) = p.values().iter().enumerate().find(|(_, x)| tol.is_negative(*x)) {
        return Err(Error::MalformedDistribution(format!("p_{} = {x} is negative", index_key(p.n(), idx))));
    }
    p.check_normalized(tol)?;
    p.prob_to_moment()
}

/// Float mode accepts entries within tolerance of `[0, 1]`; pull them in.
fn clamp<S: Scalar>(theta: StochasticParams<Surd<S>>) -> StochasticParams<Surd<S>> {
    if S::EXACT {
        return theta;
    }
    theta.map(|x| Surd::from_base(S::from_f64(x.to_f64().clamp(0.0, 1.0)).expect("finite")))
}

fn lift_surd<S: Scalar>(p: &Distribution<S>) -> Distribution<Surd<S>> {
    p.map(|x| Surd::from_base(x.clone()))
}

/// Forward check of a candidate on all `n` nodes.
fn reproduces<S: Scalar>(theta: &StochasticParams<Surd<S>>, p: &Distribution<S>, tol: &Tolerance) -> Result<Option<Witness<S>>> {
    let image = phi_baum(theta, p.n(), CoordSystem::Probability)?;
    Ok(first_mismatch(&lift_surd(p), &image, tol).map(|(index, expected, found)| Witness::ForwardMismatch {
        index,
        key: index_key(p.n(), index),
        expected,
        found,
    }))
}

fn rational_theta<S: Scalar>(pi1: S, t01: S, t11: S, e01: S, e11: S) -> StochasticParams<Surd<S>> {
    let s = |x: S| Surd::from_base(x);
    let one = S::one();
    StochasticParams::from_parts(
        [s(one.clone() - pi1.clone()), s(pi1)],
        [[s(one.clone() - t01.clone()), s(t01)], [s(one.clone() - t11.clone()), s(t11)]],
        [[s(one.clone() - e01.clone()), s(e01)], [s(one - e11.clone()), s(e11)]],
    )
}

/// A stochastic point realizing a submodel candidate, or the reason there
/// is none.
fn submodel_theta<S: Scalar>(params: &StratumParams<S>) -> std::result::Result<StochasticParams<Surd<S>>, String> {
    match params {
        StratumParams::Equilibrium(e) => {
            let eta = e.to_birational();
            let lifted = eta.lift_algebraic(Sign::Plus).map_err(|err| err.to_string())?;
            Ok(lifted.to_stochastic())
        }
        StratumParams::Binid(BinidParams { alpha, beta }) => {
            Ok(rational_theta(alpha.clone(), beta.clone(), beta.clone(), S::zero(), S::one()))
        }
        StratumParams::Biid { u } => Ok(rational_theta(u.clone(), u.clone(), u.clone(), S::zero(), S::one())),
        StratumParams::Generic(eta) => Ok(eta.lift_algebraic(Sign::Plus).map_err(|err| err.to_string())?.to_stochastic()),
    }
}

fn submodel_candidate<S: Scalar>(
    stratum: Stratum,
    w: &Window3<S>,
    tol: &Tolerance,
    guards: &mut Vec<Guard<S>>,
) -> Option<StratumParams<S>> {
    match stratum {
        Stratum::Equilibrium => {
            let m = window_moments(w);
            let outcome: RecoveryOutcome<S> = crate::recover::recover_stratum(&m, Stratum::Equilibrium, tol).ok()?;
            guards.extend(outcome.guards);
            outcome.params
        }
        Stratum::Binid => Some(StratumParams::Binid(BinidParams { alpha: w.m1.clone(), beta: w.m2.clone() })),
        Stratum::Biid => Some(StratumParams::Biid { u: w.m1.clone() }),
        _ => None,
    }
}

fn window_moments<S: Scalar>(w: &Window3<S>) -> Distribution<S> {
    let values = vec![
        S::one(),
        w.m3.clone(),
        w.m2.clone(),
        w.m23.clone(),
        w.m1.clone(),
        w.m13.clone(),
        w.m12.clone(),
        w.m123.clone(),
    ];
    Distribution::new(3, CoordSystem::Moment, values).expect("shape is fixed")
}

fn submodel_branch<S: Scalar>(
    p: &Distribution<S>,
    w: &Window3<S>,
    tol: &Tolerance,
    mut guards: Vec<Guard<S>>,
    eta: Option<BirationalParams<S>>,
) -> Result<MembershipCertificate<S>> {
    let mut attempts = Vec::new();
    for stratum in [Stratum::Equilibrium, Stratum::Binid, Stratum::Biid] {
        let before = guards.len();
        let Some(params) = submodel_candidate(stratum, w, tol, &mut guards) else {
            let reason = match guards[before..].iter().find(|g| g.vanished) {
                Some(g) => format!("guard {} vanished", g.name),
                None => "recovery failed".to_string(),
            };
            attempts.push(Attempt { stratum, reason });
            continue;
        };
        let theta = match submodel_theta(&params) {
            Ok(theta) => theta,
            Err(reason) => {
                attempts.push(Attempt { stratum, reason });
                continue;
            }
        };
        if let Some((entry, value)) = theta.first_non_stochastic_entry(tol) {
            attempts.push(Attempt { stratum, reason: format!("{entry} = {value} outside [0, 1]") });
            continue;
        }
        let theta = clamp(theta);
        if let Some(Witness::ForwardMismatch { key, .. }) = reproduces(&theta, p, tol)? {
            attempts.push(Attempt { stratum, reason: format!("forward image differs at {key}") });
            continue;
        }
        let params = match params {
            StratumParams::Binid(BinidParams { alpha, beta }) if tol.eq(&alpha, &beta) => StratumParams::Biid { u: alpha },
            other => other,
        };
        let mut cert = MembershipCertificate::new(Verdict::InSubmodel, guards);
        cert.stratum = Some(params.stratum());
        cert.theta = Some(theta);
        cert.submodel = Some(params);
        cert.eta = eta;
        return Ok(cert);
    }
    let mut cert = MembershipCertificate::new(Verdict::NotInModel, guards);
    cert.eta = eta;
    cert.witness = Some(Witness::Exhausted { attempts });
    Ok(cert)
}

/// Membership test for a probability distribution on `n ≥ 3` nodes.
///
/// 1. Recover `(a, b, c, u, v)` from the first three nodes; if a guard
///    vanishes (or `v = 0`), fall through to the submodel branch.
/// 2. Reject if `v < 0`.
/// 3. Lift with `v₀ = +√v`; reject if `(π, T, E)` is not stochastic.
/// 4. Accept iff `φₙ(θ)` equals the input on all `n` nodes.
///
/// The submodel branch tries equilibrium, BINID and BIID in turn, each
/// with a stochastic witness and a full forward check.
pub fn membership_test<S: Scalar>(p: &Distribution<S>, tol: &Tolerance) -> Result<MembershipCertificate<S>> {
    let moments = validate(p, tol)?;
    let w = Window3::new(&moments)?;
    let outcome = crate::recover::recover_stratum(&window_moments(&w), Stratum::Generic, tol)?;
    let guards = outcome.guards;
    let Some(StratumParams::Generic(eta)) = outcome.params else {
        return submodel_branch(p, &w, tol, guards, None);
    };
    if tol.is_negative(&eta.v) {
        let mut cert = MembershipCertificate::new(Verdict::NotInModel, guards);
        cert.witness = Some(Witness::NegativeV { v: eta.v.clone() });
        cert.eta = Some(eta);
        return Ok(cert);
    }
    if tol.vanishes(&eta.v, 1.0) {
        return submodel_branch(p, &w, tol, guards, Some(eta));
    }
    let theta = eta.lift_algebraic(Sign::Plus)?.to_stochastic();
    let mut cert = MembershipCertificate::new(Verdict::NotInModel, guards);
    cert.eta = Some(eta);
    cert.stratum = Some(Stratum::Generic);
    if let Some((entry, value)) = theta.first_non_stochastic_entry(tol) {
        cert.witness = Some(Witness::NonStochasticEntry { entry, value });
        cert.theta = Some(theta);
        return Ok(cert);
    }
    let theta = clamp(theta);
    if let Some(witness) = reproduces(&theta, p, tol)? {
        cert.witness = Some(witness);
        cert.theta = Some(theta);
        return Ok(cert);
    }
    cert.verdict = Verdict::InModel;
    cert.theta = Some(theta);
    Ok(cert)
}

/// The two-point fiber `{θ, swap(θ)}` over a generic distribution.
///
/// With `relaxed` the stochasticity requirement is dropped, leaving the real
/// points of the fiber; the forward image must still match the input.
pub fn fiber<S: Scalar>(p: &Distribution<S>, tol: &Tolerance, relaxed: bool) -> Result<Vec<StochasticParams<Surd<S>>>> {
    let moments = validate(p, tol)?;
    let eta = match crate::recover::recover_generic(&moments, tol) {
        Ok(eta) => eta,
        Err(Error::GuardVanished { guard, .. }) => {
            return Err(Error::IdentificationFailed(format!(
                "guard {guard} vanished: the fiber over a submodel point is not finite"
            )))
        }
        Err(e) => return Err(e),
    };
    if tol.is_negative(&eta.v) {
        return Err(Error::NotInModel(format!("recovered v = {} is negative", eta.v)));
    }
    if tol.vanishes(&eta.v, 1.0) {
        return Err(Error::IdentificationFailed("recovered v = 0: the fiber over a submodel point is not finite".into()));
    }
    let theta = clamp(eta.lift_algebraic(Sign::Plus)?.to_stochastic());
    if !relaxed {
        if let Some((entry, value)) = theta.first_non_stochastic_entry(tol) {
            return Err(Error::NotInModel(format!("{entry} = {value} outside [0, 1]")));
        }
    }
    if let Some(Witness::ForwardMismatch { key, expected, found, .. }) = reproduces(&theta, p, tol)? {
        return Err(Error::NotInModel(format!("forward image differs at {key}: expected {expected}, found {found}")));
    }
    let swapped = theta.swap();
    Ok(if swapped == theta { vec![theta] } else { vec![theta, swapped] })
}

/// Equilibrium parameters as a stochastic point: `π` is the stationary
/// vector of `T`.
pub fn equilibrium_theta<S: Scalar>(e: &EquilibriumParams<S>) -> Result<StochasticParams<Surd<S>>> {
    Ok(e.to_birational().lift_algebraic(Sign::Plus)?.to_stochastic())
}
