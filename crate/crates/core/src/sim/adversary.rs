use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;

use super::{CorrelationCase, SimError, SimScenario, SimWorld, Strategy};
use crate::graph::EntityId;
use crate::{Error, Graph, GraphError, ScoreTable};

/// Where malicious routers may go, resolved once per scenario and sampled
/// once per round. Indices follow the graph's merged view.
#[derive(Clone, Debug, PartialEq)]
pub enum AdversaryPlan {
    /// Always the same routers.
    Fixed(Vec<usize>),
    /// `count` routers drawn uniformly from `eligible`.
    Uniform { eligible: Vec<usize>, count: usize },
    /// `count` routers drawn without replacement with the given weights.
    Weighted { weights: Vec<f64>, count: usize },
}

impl AdversaryPlan {
    pub fn new(world: &SimWorld, scenario: &SimScenario) -> Result<Self, SimError> {
        let view = world.graph.merged();
        let n = view.len();
        let count = scenario.malicious_count(n);
        Ok(match scenario.strategy {
            Strategy::OriginalTor => {
                let mut order: Vec<usize> = (0..n).collect();
                let bw = |i: usize| world.graph.entity(view.id(i)).expect("entity").bandwidth;
                // Highest bandwidth first, lower id on ties.
                order.sort_by(|&a, &b| bw(b).total_cmp(&bw(a)).then(a.cmp(&b)));
                order.truncate(count);
                order.sort_unstable();
                AdversaryPlan::Fixed(order)
            }
            Strategy::OpportunisticTor => AdversaryPlan::Uniform {
                eligible: (0..n).collect(),
                count,
            },
            Strategy::PracticalSTor => {
                let mean = world
                    .mean_trust
                    .as_ref()
                    .expect("mean trust is computed for this strategy");
                AdversaryPlan::Weighted {
                    weights: mean.iter().map(|t| (1.0 - t).max(0.0)).collect(),
                    count,
                }
            }
            Strategy::TheoreticalSTor => {
                let src = view.index_of(world.source()).expect("source exists");
                let inside: BTreeSet<usize> = world
                    .scores
                    .iter()
                    .map(|(id, _)| view.index_of(id).expect("scored entity exists"))
                    .collect();
                let eligible: Vec<usize> =
                    (0..n).filter(|i| *i != src && !inside.contains(i)).collect();
                if eligible.is_empty() && count > 0 {
                    return Err(SimError::InfeasibleAssignment { requested: count });
                }
                AdversaryPlan::Uniform {
                    count: count.min(eligible.len()),
                    eligible,
                }
            }
        })
    }

    /// Malicious flag per router for one round.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<bool> {
        let mut flags = vec![false; n];
        match self {
            AdversaryPlan::Fixed(chosen) => {
                for &i in chosen {
                    flags[i] = true;
                }
            }
            AdversaryPlan::Uniform { eligible, count } => {
                for k in index::sample(rng, eligible.len(), *count) {
                    flags[eligible[k]] = true;
                }
            }
            AdversaryPlan::Weighted { weights, count } => {
                let picked = index::sample_weighted(rng, weights.len(), |i| weights[i], *count)
                    .expect("weights are finite and non-negative");
                for i in picked {
                    flags[i] = true;
                }
            }
        }
        flags
    }
}

/// Flags malicious routers in `world.graph` for the scenario's strategy and
/// returns them in id order.
pub fn assign_malicious<R: Rng + ?Sized>(
    world: &mut SimWorld,
    scenario: &SimScenario,
    rng: &mut R,
) -> Result<Vec<EntityId>, Error> {
    let plan = AdversaryPlan::new(world, scenario)?;
    let view = world.graph.merged();
    let ids: Vec<EntityId> = view.ids().to_vec();
    let flags = plan.draw(ids.len(), rng);
    let mut chosen = Vec::new();
    for (id, flag) in ids.into_iter().zip(flags) {
        world.graph.set_malicious(id, flag)?;
        if flag {
            chosen.push(id);
        }
    }
    Ok(chosen)
}

/// Reassigns the existing bandwidth values so they line up with the trust
/// scores of `scores.source`.
///
/// In the best case the circle receives the largest values, handed out in
/// trust order, and everyone else keeps their relative order among the
/// smallest. The worst case gives the circle the smallest values in reverse
/// trust order and everyone else the largest. Ties in trust go to the lower
/// id first.
pub fn assign_bandwidth_correlation(
    graph: &mut Graph,
    scores: &ScoreTable,
    case: CorrelationCase,
) -> Result<(), GraphError> {
    if !graph.contains(scores.source) {
        return Err(GraphError::UnknownEntity(scores.source));
    }
    if case == CorrelationCase::None {
        return Ok(());
    }
    let mut members: Vec<(EntityId, f64)> = scores.iter().map(|(id, s)| (id, s.ts)).collect();
    members.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut outsiders: Vec<(EntityId, f64)> = graph
        .entities()
        .filter(|e| scores.get(e.id).is_none())
        .map(|e| (e.id, e.bandwidth))
        .collect();
    outsiders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut values: Vec<f64> = graph.entities().map(|e| e.bandwidth).collect();
    values.sort_by(|a, b| b.total_cmp(a));

    let (top, bottom) = values.split_at(match case {
        CorrelationCase::Best => members.len(),
        _ => outsiders.len(),
    });
    let (member_values, outsider_values): (Vec<f64>, Vec<f64>) = match case {
        CorrelationCase::Best => (top.to_vec(), bottom.to_vec()),
        _ => (bottom.iter().rev().copied().collect(), top.to_vec()),
    };
    for ((id, _), b) in members.iter().zip(member_values) {
        graph.set_bandwidth(*id, b)?;
    }
    for ((id, _), b) in outsiders.iter().zip(outsider_values) {
        graph.set_bandwidth(*id, b)?;
    }
    Ok(())
}
