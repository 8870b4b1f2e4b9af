//! Two-state binary hidden Markov models: forward maps, coordinate changes,
//! parameter recovery, implicitization tests and multi-symbol reduction.
//!
//! Every algorithm is generic over [`Scalar`]: [`Rational`] for exact
//! arithmetic, `f64` for speed. Observed strings are indexed with the first
//! node as the most significant bit.

pub mod coords;
pub mod error;
pub mod forward;
pub mod invariants;
pub mod json;
pub mod lattice;
pub mod membership;
pub mod multistate;
pub mod params;
pub mod random;
pub mod recover;
pub mod scalar;

pub use coords::{CoordSystem, Distribution};
pub use error::{Error, Result};
pub use forward::{phi_baum, phi_bruteforce, psi3, psi_n, sample_sequences, trace_generators, TraceGenerators};
pub use invariants::{InvariantReport, InvariantSet};
pub use membership::{fiber, membership_test, MembershipCertificate, Verdict, Witness};
pub use multistate::{forward_multistate, identify, MultistateDistribution, MultistateParams};
pub use params::{BirationalParams, LinearParams, Sign, StochasticParams};
pub use recover::{classify, recover_generic, RecoveryOutcome, Stratum, StratumParams};
pub use scalar::{Rational, Scalar, Surd, Tolerance};
