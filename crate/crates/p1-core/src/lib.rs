//! Algebraic statistics for the Holland-Leinhardt p1 directed random graph model.
//!
//! The p1 model assigns each unordered pair of nodes (a *dyad*) an independent
//! distribution over its four possible configurations: no edge, a single edge in
//! either direction, or a reciprocated pair of edges. Three flavors are supported,
//! differing in how reciprocation is parametrized: none, a single constant effect,
//! or an edge-dependent effect.
//!
//! The crate provides, for all three flavors:
//!
//! * construction of the integer design matrices (full, simplified, and the
//!   common submatrix shared by all flavors) — [`model`];
//! * generation of Markov moves that respect the one-configuration-per-dyad
//!   sampling constraint, built from cycles of the bipartite out/in-role graph
//!   and closed under lifting and overlap composition — [`moves`];
//! * exact fiber enumeration, fiber-graph connectivity checks, and the Monte
//!   Carlo goodness-of-fit walk — [`fiber`];
//! * maximum likelihood estimation by moment-equation solving, including the
//!   extended MLE on boundary faces — [`inference`];
//! * exact rational polyhedral geometry of the marginal cone: relative-interior
//!   tests, facial sets, facet enumeration by double description — [`geometry`];
//! * exhaustive small-network censuses of sufficient statistics and MLE
//!   existence — [`census`].
//!
//! Everything combinatorial is exact integer or rational arithmetic; floating
//! point is confined to probabilities and likelihood optimization.

// Numeric kernels here iterate several arrays in lockstep; indexed loops are
// the clearer form for that.
#![allow(clippy::needless_range_loop)]

pub mod census;
pub mod error;
pub mod fiber;
pub mod geometry;
pub mod inference;
pub mod model;
pub mod moves;

pub use error::{Error, Result};
pub use model::{
    DesignMatrix, DyadConfig, MatrixForm, Network, ParameterVector, ProbabilityVector,
    ReciprocationVariant, SufficientStatistic,
};
pub use moves::MarkovMove;
