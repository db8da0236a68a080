//! Discretization-free numerical association rule mining.
//!
//! Rules are searched directly over real-valued genotypes: an
//! [`encoding::Scheme`] decodes a point of the unit hypercube into a
//! [`rule::Rule`] with interval and category conditions, the rule is scored
//! by the measures in [`rule`], combined into objectives by [`fitness`], and
//! one of the population-based [`optimizers`] drives the search. [`miner`]
//! ties these together.

pub mod cli;
pub mod dataset;
pub mod encoding;
pub mod fitness;
pub mod miner;
pub mod optimizers;
pub mod rule;

pub use dataset::{Attribute, AttributeKind, Dataset, DatasetError};
pub use encoding::{DecodeOutcome, Scheme};
pub use fitness::{Measure, Objective, ObjectiveVector, ParetoArchive};
pub use miner::{generate_planted, mine, MiningConfig, MoMode, RuleSet};
pub use optimizers::{Algorithm, OptimizerConfig, SearchSpace};
pub use rule::{Condition, InterestingnessVariant, Metrics, Predicate, Rule};
