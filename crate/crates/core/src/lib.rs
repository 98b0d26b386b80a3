//! Distributed greedy matching for device-to-device resource sharing.
//!
//! The crate bundles a round-synchronous greedy matching engine, exact
//! optimal-matching oracles and upper bounds for small or structured
//! instances, closed-form and recursive average-case formulas, and a seeded
//! Monte Carlo harness that cross-checks the two.

pub mod analytics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod greedy;
pub mod rng;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
pub use graph::{Edge, GeneratorSpec, WeightSource, WeightedGraph};
pub use greedy::{greedy_match, greedy_match_multiunit, GreedyOptions, MatchingOutcome, TieRule};
pub use weights::WeightModel;
