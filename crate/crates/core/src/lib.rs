//! Exact solver toolkit for constrained multi-criteria absorbing decision
//! processes.
//!
//! The crate works with finite decision processes that carry a designated
//! absorbing set: once the chain enters it, it stays and collects no further
//! reward. Everything of interest about a policy is summarized by its
//! *occupation measure* — the expected number of visits to each state-action
//! pair before absorption — because expected total rewards are linear in it.
//! The achievable occupation measures form a polytope cut out by linear flow
//! balance equations, so questions about policies (feasibility, optimality,
//! how much randomization a performance target really needs) become questions
//! about a polytope, answered here in exact rational arithmetic.
//!
//! The main entry points:
//!
//! - [`model::ModelSpec`]: validated model description, absorption
//!   classification with machine-checkable certificates.
//! - [`policy`]: deterministic, stationary, chattering, and eventually-
//!   stationary Markov policy classes.
//! - [`occupation`]: occupation measures and performance vectors of policies.
//! - [`lp`] / [`geometry`]: exact simplex, vertex enumeration, and the
//!   occupation polytope with its criterion-space image.
//! - [`chattering`]: mixture construction — match any achievable performance
//!   vector with a chattering policy of provably small order.
//! - [`solver`]: constrained optimization over the occupation polytope with
//!   exact duals.
//! - [`montecarlo`]: reproducible episode simulation for statistical
//!   cross-checks of exact answers.
//! - [`harness`]: random instance generation and the self-verification
//!   suites that replay the structural facts the crate relies on.

#![forbid(unsafe_code)]

pub mod chattering;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod montecarlo;
pub mod occupation;
pub mod policy;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use model::{AbsorptionCertificate, AbsorptionReport, ModelSpec, ValidationResult};
pub use scalar::{Rational, Scalar};
