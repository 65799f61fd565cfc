//! Generation of high-dimensional correlated binary random vectors.
//!
//! Given marginal probabilities `p_1..p_m` and a non-negative correlation
//! structure (exchangeable, decaying-product, 1-dependent, K-dependent, or a
//! general matrix), this crate derives the intermediate Bernoulli parameters
//! of a mixture/product construction, checks their feasibility, and samples
//! binary rows in time linear in `m` (quadratic for general matrices).
//!
//! The crate is split along the pipeline:
//!
//! * [`stream`] — the seedable, portable randomness source,
//! * [`types`] — marginals, correlation specs, derived parameters, samples,
//! * [`constraints`] — pairwise bounds, positive definiteness, per-algorithm
//!   applicability conditions and maximal-correlation solvers,
//! * [`generators`] — the five derivation/sampling pairs and the 1-dependent
//!   auto-dispatcher,
//! * [`verify`] — an exact small-dimension distribution oracle plus
//!   empirical moment checks.
//!
//! Everything here is `no_std + alloc`; file formats, the CLI, and the
//! timing harness live in the companion `cbgen` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constraints;
pub mod generators;
pub mod stream;
pub mod types;
pub mod verify;

pub use constraints::{FeasibilityReport, Verdict};
pub use generators::{generate, GenerationPlan};
pub use stream::RandomStream;
pub use types::{AlgorithmId, CorrelationSpec, Error, MarginalVector, SampleMatrix};

/// Derived probabilities within this distance outside `[0, 1]` are treated
/// as rounding noise and clamped to the boundary; anything further out is a
/// genuine feasibility failure.
pub const EPS_CLAMP: f64 = 1e-12;
