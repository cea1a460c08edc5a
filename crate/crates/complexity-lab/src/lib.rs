//! complexity-lab: exact and Monte Carlo estimators of dimension and margin
//! complexity measures for finite hypothesis classes.
//!
//! The crate is organized in layers:
//!
//! * [`matrix`] / [`rng`] — dense linear algebra and deterministic seeding
//!   shared by everything else.
//! * [`core`] — hypothesis classes, distributions, losses, expected loss.
//! * [`spectral`] — Gram matrices, SQ-dimension, minEV-dimension, the
//!   Gershgorin bound, and the optimal average rank-d error.
//! * [`constructions`] — concrete classes and functions: parities,
//!   one-sparse indicators, pattern decision lists, the anchored zigzag
//!   function and its ReLU decomposition, Gaussian-input correlation
//!   estimates, and finite restrictions.
//! * [`embeddings`] — feature embeddings (identity, Gaussian random
//!   projection, truncated-SVD, cover-based) and the span-projection
//!   reduction of an embedding to a sample.
//! * [`learners`] — empirical risk minimizers for linear predictors, with
//!   and without norm constraints, plus simulated learning sweeps.
//! * [`measures`] — the dimension/margin complexity criteria themselves and
//!   every derived lower/upper bound the crate can certify.
//!
//! Everything is deterministic given a master seed: randomness flows through
//! labeled ChaCha8 streams (see [`rng`]), eigensolves use fixed-order Jacobi
//! sweeps, and reductions are fixed-order.

pub mod constructions;
pub mod core;
pub mod embeddings;
pub mod learners;
pub mod matrix;
pub mod measures;
pub mod rng;
pub mod spectral;
