//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. Variants are grouped by the
//! kind of failure so callers (notably the CLI) can map them onto exit codes:
//! input problems (validation, infeasibility, bad policies) are recoverable
//! user errors, while [`Error::Internal`], [`Error::OrderBoundViolated`] and
//! [`Error::NoDecomposition`] signal that a mathematical guarantee the crate
//! promises to uphold was observed to fail — those should never occur on a
//! valid uniformly-absorbing model.

use thiserror::Error;

use crate::model::ValidationResult;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The model failed structural validation; the payload lists every
    /// violation found.
    #[error("model failed validation:\n{0}")]
    Unvalidated(ValidationResult),

    /// The model is not uniformly absorbing on its reachable states, so
    /// occupation-measure machinery is undefined.
    #[error("model is not uniformly absorbing (expected total absorption time is unbounded)")]
    NotAbsorbing,

    /// A policy does not fit the model (wrong states, bad distributions, …).
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    /// Mismatched vector/matrix dimensions in a low-level call.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A square linear system had no unique solution.
    #[error("linear system is singular")]
    SingularSystem,

    /// The linear objective is unbounded over the feasible region.
    #[error("objective is unbounded over the feasible region")]
    Unbounded,

    /// The constraint system has no feasible point.
    #[error("constraint system is infeasible")]
    Infeasible,

    /// Vertex enumeration was refused because the variable count exceeds the
    /// configured cap.
    #[error("vertex enumeration over {vars} variables exceeds the cap of {cap} (raise ABSORBD_VERTEX_CAP or pass a larger cap)")]
    TooLarge { vars: usize, cap: usize },

    /// A constraint references absorbed pairs, has the wrong dimension, or is
    /// otherwise malformed.
    #[error("bad constraint: {0}")]
    BadConstraint(String),

    /// A distribution's support is too large to pack into the requested
    /// number of selectors.
    #[error("support of size {support} at state {state} cannot be packed into {cap} selectors")]
    SupportTooLarge {
        state: String,
        support: usize,
        cap: usize,
    },

    /// A vertex disintegration exceeded the guaranteed chattering order
    /// bound. This contradicts the basic-solution counting argument and is
    /// treated as an internal invariant violation.
    #[error("chattering order bound violated at state {state}: support {support} > bound {bound}")]
    OrderBoundViolated {
        state: String,
        support: usize,
        bound: usize,
    },

    /// No convex decomposition of a constrained vertex into deterministic
    /// occupation measures was found within the component bound. This
    /// contradicts the mixture theorem and is treated as an internal
    /// invariant violation.
    #[error("no mixture decomposition with at most {bound} deterministic components")]
    NoDecomposition { bound: usize },

    /// The requested performance vector lies outside the achievable set.
    #[error("target performance vector is not achievable")]
    Unachievable,

    /// A point handed to a vertex-consuming operation is not a vertex.
    #[error("point is not a vertex of the polytope: {0}")]
    NotAVertex(String),

    /// Malformed input data (files, numbers, CLI payloads).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An internal invariant that should hold on every valid input failed.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for variants that signal a broken mathematical guarantee rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::Internal(_)
                | Error::OrderBoundViolated { .. }
                | Error::NoDecomposition { .. }
        )
    }
}
