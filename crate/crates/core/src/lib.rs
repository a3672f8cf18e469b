//! Local Friendliness geometry toolkit.
//!
//! The crate is organised around a shared vocabulary of bipartite
//! [`Behavior`]s and linear [`Inequality`] functionals over them, and four
//! engines that consume it:
//!
//! * [`polytope`]: exact LHV / LF / NS correlation polytopes (vertices,
//!   LP membership with certificates, facets, optimisation, 2D slices);
//! * [`quantum`]: dense state-vector simulation of the extended Wigner's
//!   friend protocol, plus an optimiser and brute-force grid oracle;
//! * [`causal`]: DAGs, d-separation, the causal Markov condition,
//!   faithfulness and the Bell-DAG fine-tuning scan;
//! * [`principles`]: the AND-OR implication graph between causal principles
//!   and the no-go theorems that falsify them.
//!
//! Numeric code is generic over [`Scalar`]; the concrete aliases below pin
//! the two instantiations used in practice: exact big rationals for the
//! polytope pipeline and `f64` for the quantum pipeline.

pub mod behavior;
pub mod causal;
pub mod cg;
pub mod dd;
pub mod error;
pub mod fixtures;
pub mod fm;
pub mod json;
pub mod lp;
pub mod polytope;
pub mod principles;
pub mod quantum;
pub mod scalar;

pub use behavior::{
    deterministic_behavior, evaluate_inequality, validate_behavior, Behavior, DeterministicStrategy,
    Inequality, Scenario, Sense, ValidationReport,
};
pub use error::{Error, Result};
pub use scalar::{rationalize, Field, Rational, Rationalized, Scalar};

/// Behavior with exact rational entries (polytope pipeline).
pub type ExactBehavior = Behavior<Rational>;
/// Behavior with `f64` entries (quantum pipeline).
pub type FloatBehavior = Behavior<f64>;
/// Inequality with exact rational coefficients.
pub type ExactInequality = Inequality<Rational>;
/// Inequality with `f64` coefficients.
pub type FloatInequality = Inequality<f64>;
