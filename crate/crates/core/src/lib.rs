//! angularft: an exact symbolic + numeric engine for three-dimensional
//! Fourier transforms of `p^n x (angular monomial)` integrands.
//!
//! The symbolic side works in an exact coefficient ring (big rationals
//! times powers of `i` and `pi`) and produces coordinate-space results
//! as sums of `r` powers, angular tensors, and three-dimensional delta
//! functions. The numeric side evaluates the same objects by cutoff
//! regularization and quadrature, and decides identities between
//! generalized functions by pairing both sides with smooth test
//! functions.
//!
//! Modules:
//! - [`exact`]: big-rational coefficient ring, double factorials, and the
//!   closed-form radial coefficient `chi(n, l)`.
//! - [`tensor`]: exact symmetric tensor algebra over abstract indices and
//!   the angular-momentum decomposition of unit-vector monomials.
//! - [`radial`]: spherical Bessel functions, cutoff-regulated radial
//!   integrals, and the delta-representation family `R_l(lambda; r)`.
//! - [`transform`]: the forward/inverse transform engine and the
//!   derivative-identity catalog built on top of it.
//! - [`verify`]: test-function pairing machinery that checks the
//!   generated identities numerically.
//! - [`cli`]: command-line front end with a small expression grammar.

pub mod cli;
pub mod exact;
mod quad;
pub mod radial;
pub mod tensor;
pub mod transform;
pub mod verify;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input outside an operation's domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sum of exact scalars whose `i^a pi^b` prefactors differ; the
    /// coefficient ring does not close under such sums.
    #[error("not representable in ring: {0}")]
    NotRepresentable(String),

    /// A transform was requested at an exponent/rank combination with no
    /// finite closed form in this framework.
    #[error(
        "outside framework: effective power n = {n} with angular momentum l = {ell} \
         requires -(l+3) < n <= l"
    )]
    OutsideFramework { n: i64, ell: i64 },

    /// Invalid argument (unknown index, non-unit direction, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Numeric integration failed to converge; carries the best estimate.
    #[error("quadrature did not converge: {detail} (best estimate {estimate:e})")]
    Quadrature { estimate: f64, detail: String },

    /// A `delta3` term whose radial power does not pair with the angular
    /// rank; such a term has no defined test-function pairing.
    #[error(
        "unpaired singular delta: delta3 term with r power {r_pow} and angular \
         momentum {ell} (pairing requires r power -{ell})"
    )]
    UnpairedDelta { r_pow: i64, ell: i64 },

    /// Expression syntax error at a byte offset.
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    /// Expression is grammatical but violates a semantic rule.
    #[error("semantic error: {0}")]
    Semantic(String),

    /// Internal invariant violation; indicates a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
