//! Social-trust-based router selection for onion routing.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`fuzzy`] turns each friendship link's social attributes into a direct
//!    trust value in `[0, 1]`.
//! 2. [`propagation`] derives a trust score for every member of an entity's
//!    friendship circle as the best product of trust values along a
//!    hop-bounded path.
//! 3. [`selection`] picks routers and circuits, mixing trust score with
//!    normalised bandwidth, from a trust-filtered candidate set.
//! 4. [`sim`] places malicious routers under several adversary models and
//!    measures how often they get picked.
//!
//! Arithmetic over trust values is generic over [`Scalar`]; the aliases below
//! fix it to `f64` for ordinary use and to [`Rational`] for exact checks.

pub mod format;
pub mod fuzzy;
pub mod generator;
pub mod graph;
pub mod propagation;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod sim;

pub use format::{parse_graph, write_graph, ParseError};
pub use fuzzy::{compute_link_trust, FuzzyError, FuzzyRuleSet, QualitativeClass};
pub use generator::{generate_graph, GeneratorError, GeneratorSpec};
pub use graph::{EntityId, FriendLink, GraphError, LinkKey, NetworkId, SocialGraph};
pub use propagation::{propagate, propagate_all, PropagationError, TrustScoreTable};
pub use scalar::Scalar;
pub use selection::{SelectionError, SelectionMode, SelectionPolicy};
pub use sim::{SimError, SimScenario, Strategy};

/// Exact rational trust values.
pub type Rational = num_rational::Ratio<i128>;

pub type Graph = SocialGraph<f64>;
pub type ExactGraph = SocialGraph<Rational>;
pub type ScoreTable = TrustScoreTable<f64>;
pub type ExactScoreTable = TrustScoreTable<Rational>;

/// Any error raised by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
