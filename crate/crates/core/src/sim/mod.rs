//! Adversary simulation.
//!
//! An evaluated user repeatedly picks routers (or whole circuits) while a
//! fraction of all routers is malicious. Four adversary models decide which
//! routers those are:
//!
//! | strategy            | selection          | malicious routers                         |
//! |---------------------|--------------------|-------------------------------------------|
//! | `original_tor`      | bandwidth only     | the highest-bandwidth routers             |
//! | `opportunistic_tor` | bandwidth only     | uniformly random routers                  |
//! | `practical_stor`    | trust + bandwidth  | random, biased towards poorly trusted ones |
//! | `theoretical_stor`  | trust + bandwidth  | random, never inside the user's circle    |
//!
//! Malicious routers are re-drawn every round from the round's own random
//! stream, so per-round ratios are independent samples over both the
//! adversary's placement and the user's choices.

mod adversary;
mod report;
mod rounds;
mod scenario;
mod sweep;

pub use adversary::{assign_bandwidth_correlation, assign_malicious, AdversaryPlan};
pub use report::{cdf_csv, empirical_cdf, mean_report, rounds_csv, sweep_csv};
pub use rounds::{run_circuit_rounds, run_selection_rounds, RoundReport};
pub use scenario::{CorrelationCase, SimScenario, Strategy};
pub use sweep::{sweep, GraphSource, SweepAxis, SweepPoint};

use thiserror::Error;

use crate::fuzzy::{compute_link_trust, FuzzyRuleSet};
use crate::generator::{generate_graph, GenerationReport, GeneratorConfig};
use crate::graph::EntityId;
use crate::propagation::{propagate, propagate_all};
use crate::{Error, Graph, ScoreTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("cannot place {requested} malicious routers outside a friendship circle that covers every other entity")]
    InfeasibleAssignment { requested: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("sweep needs at least one value")]
    EmptySweep,
    #[error("sweep values must be sorted ascending")]
    UnsortedSweep,
    #[error("unknown sweep axis `{0}` (expected omega, ts_h, fraction or n)")]
    UnknownAxis(String),
    #[error("sweeping over n needs a generated graph, not a graph file")]
    FixedGraphSizeSweep,
}

/// Graph and trust data shared by every round of a scenario.
#[derive(Clone, Debug)]
pub struct SimWorld {
    /// Graph with trust values; bandwidths already rearranged for the
    /// scenario's correlation case.
    pub graph: Graph,
    pub scores: ScoreTable,
    /// Mean trust score each entity receives over all other entities (absent
    /// scores count as 0), indexed like the merged view. Only computed for
    /// strategies that need it.
    pub mean_trust: Option<Vec<f64>>,
}

impl SimWorld {
    pub fn new(mut graph: Graph, scenario: &SimScenario) -> Result<Self, Error> {
        scenario.validate()?;
        let scores = propagate(&graph, scenario.source, scenario.max_hops)?;
        assign_bandwidth_correlation(&mut graph, &scores, scenario.case)?;
        let mean_trust = match scenario.strategy {
            Strategy::PracticalSTor => Some(mean_received_trust(&graph, scenario.max_hops)?),
            _ => None,
        };
        Ok(SimWorld {
            graph,
            scores,
            mean_trust,
        })
    }

    pub fn source(&self) -> EntityId {
        self.scores.source
    }
}

fn mean_received_trust(graph: &Graph, max_hops: usize) -> Result<Vec<f64>, Error> {
    let view = graph.merged();
    let n = view.len();
    let mut sum = vec![0.0; n];
    for table in propagate_all(graph, max_hops)?.values() {
        for (target, s) in table.iter() {
            sum[view.index_of(target).expect("scored entities exist")] += s.ts;
        }
    }
    let others = (n.max(2) - 1) as f64;
    Ok(sum.into_iter().map(|s| s / others).collect())
}

/// Generates the scenario's synthetic graph and computes its trust values.
pub fn generate_world_graph(
    scenario: &SimScenario,
    rules: &FuzzyRuleSet,
) -> Result<(Graph, GenerationReport), Error> {
    let config = GeneratorConfig {
        n: scenario.n,
        spec: scenario.generator,
        bandwidth_max: scenario.bandwidth_max,
        networks: scenario.networks,
        max_hops: scenario.max_hops,
    };
    let (mut graph, report) = generate_graph::<f64>(&config, scenario.seed)?;
    compute_link_trust(&mut graph, rules)?;
    Ok((graph, report))
}
