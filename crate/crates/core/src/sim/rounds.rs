use rayon::prelude::*;

use super::{AdversaryPlan, SimScenario, SimWorld};
use crate::rng::{stream, Purpose};
use crate::selection::{build_candidates, CoupledSampler, SelectionPolicy};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    /// Share of picked routers that are malicious.
    pub r_mr: f64,
    /// Share of built circuits with a malicious member; circuit rounds only.
    pub r_mc: Option<f64>,
    /// Mean bandwidth of the picked routers, or of the circuits (each limited
    /// by its slowest member).
    pub avg_bandwidth: f64,
    /// Routers or circuits picked this round.
    pub draws: usize,
}

/// Everything a round needs, indexed by position in the trustworthy circle.
struct Setup {
    sampler: CoupledSampler,
    dense: Vec<usize>,
    bandwidth: Vec<f64>,
    plan: AdversaryPlan,
    n: usize,
}

impl Setup {
    fn new(world: &SimWorld, scenario: &SimScenario) -> Result<Self, Error> {
        scenario.validate()?;
        let policy = scenario.policy();
        let full_policy = SelectionPolicy { ts_h: 0.0, ..policy };
        let full = build_candidates(&world.graph, &world.scores, &full_policy)?;
        let filtered = build_candidates(&world.graph, &world.scores, &policy)?;
        let sampler = CoupledSampler::new(&full, &filtered, policy.omega)?;
        let view = world.graph.merged();
        Ok(Setup {
            sampler,
            dense: filtered
                .members
                .iter()
                .map(|c| view.index_of(c.id).expect("candidate exists"))
                .collect(),
            bandwidth: filtered.members.iter().map(|c| c.bandwidth).collect(),
            plan: AdversaryPlan::new(world, scenario)?,
            n: view.len(),
        })
    }
}

/// Draw `d` of round `r` reads its own stream, so every round and draw is
/// reproducible on its own and shared across scenarios that differ only in
/// selection parameters.
fn draw_index(round: usize, draw: usize) -> u64 {
    ((round as u64) << 32) | draw as u64
}

/// `scenario.rounds` rounds of `scenario.draws` single-router selections.
pub fn run_selection_rounds(world: &SimWorld, scenario: &SimScenario) -> Result<Vec<RoundReport>, Error> {
    let setup = Setup::new(world, scenario)?;
    let reports = (0..scenario.rounds)
        .into_par_iter()
        .map(|round| {
            let flags = setup
                .plan
                .draw(setup.n, &mut stream(scenario.seed, Purpose::Malicious, round as u64));
            let mut malicious = 0usize;
            let mut bandwidth = 0.0;
            for d in 0..scenario.draws {
                let mut rng = stream(scenario.seed, Purpose::Selection, draw_index(round, d));
                let t = setup.sampler.sample(&mut rng, &[]);
                malicious += flags[setup.dense[t]] as usize;
                bandwidth += setup.bandwidth[t];
            }
            let draws = scenario.draws;
            RoundReport {
                round,
                r_mr: malicious as f64 / draws as f64,
                r_mc: None,
                avg_bandwidth: bandwidth / draws as f64,
                draws,
            }
        })
        .collect();
    Ok(reports)
}

/// `scenario.rounds` rounds of `scenario.draws` circuit constructions.
pub fn run_circuit_rounds(world: &SimWorld, scenario: &SimScenario) -> Result<Vec<RoundReport>, Error> {
    let setup = Setup::new(world, scenario)?;
    let length = scenario.circuit_length;
    // Fail before spawning rounds if circuits cannot be built at all.
    setup
        .sampler
        .sample_circuit(&mut stream(scenario.seed, Purpose::Circuit, u64::MAX), length)?;
    let reports = (0..scenario.rounds)
        .into_par_iter()
        .map(|round| {
            let flags = setup
                .plan
                .draw(setup.n, &mut stream(scenario.seed, Purpose::Malicious, round as u64));
            let mut bad_routers = 0usize;
            let mut bad_circuits = 0usize;
            let mut bandwidth = 0.0;
            for d in 0..scenario.draws {
                let mut rng = stream(scenario.seed, Purpose::Circuit, draw_index(round, d));
                let picks = setup
                    .sampler
                    .sample_circuit(&mut rng, length)
                    .expect("checked above");
                let bad = picks.iter().filter(|&&t| flags[setup.dense[t]]).count();
                bad_routers += bad;
                bad_circuits += (bad > 0) as usize;
                bandwidth += picks
                    .iter()
                    .map(|&t| setup.bandwidth[t])
                    .fold(f64::INFINITY, f64::min);
            }
            let draws = scenario.draws;
            RoundReport {
                round,
                r_mr: bad_routers as f64 / (draws * length) as f64,
                r_mc: Some(bad_circuits as f64 / draws as f64),
                avg_bandwidth: bandwidth / draws as f64,
                draws,
            }
        })
        .collect();
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EntityId, FriendLink, NetworkId};
    use crate::sim::{mean_report, Strategy};
    use crate::Graph;

    /// Source 1 with a ring of friends; everyone is reachable.
    fn graph(n: u32) -> Graph {
        let mut g = Graph::new();
        g.add_network(NetworkId(1));
        for i in 1..=n {
            g.add_entity(EntityId(i), 1.0 + (i % 7) as f64).unwrap();
        }
        for i in 1..=n {
            for step in [1, 3] {
                let j = (i + step - 1) % n + 1;
                let tv = 0.2 + 0.1 * ((i * j) % 8) as f64;
                g.add_link(FriendLink::new(EntityId(i), EntityId(j), NetworkId(1)).with_trust(tv))
                    .unwrap();
            }
        }
        g
    }

    fn scenario(strategy: Strategy, fraction: f64) -> SimScenario {
        SimScenario {
            strategy,
            fraction,
            rounds: 40,
            draws: 200,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let sc = scenario(Strategy::PracticalSTor, 0.2);
        let w = SimWorld::new(graph(30), &sc).unwrap();
        assert_eq!(run_selection_rounds(&w, &sc).unwrap(), run_selection_rounds(&w, &sc).unwrap());
        assert_eq!(run_circuit_rounds(&w, &sc).unwrap(), run_circuit_rounds(&w, &sc).unwrap());
        let other = SimScenario { seed: 6, ..sc.clone() };
        assert_ne!(run_selection_rounds(&w, &sc).unwrap(), run_selection_rounds(&w, &other).unwrap());
    }

    #[test]
    fn zero_fraction_is_clean() {
        for strategy in Strategy::ALL {
            let sc = scenario(strategy, 0.0);
            let w = SimWorld::new(graph(30), &sc).unwrap();
            for r in run_circuit_rounds(&w, &sc).unwrap() {
                assert_eq!(r.r_mr, 0.0);
                assert_eq!(r.r_mc, Some(0.0));
            }
        }
    }

    #[test]
    fn theoretical_is_always_clean() {
        // Hop bound 1 keeps most entities outside the circle.
        let sc = SimScenario {
            max_hops: 1,
            ..scenario(Strategy::TheoreticalSTor, 0.3)
        };
        let w = SimWorld::new(graph(30), &sc).unwrap();
        assert!(run_selection_rounds(&w, &sc).unwrap().iter().all(|r| r.r_mr == 0.0));
        assert!(run_circuit_rounds(&w, &SimScenario { circuit_length: 2, ..sc.clone() })
            .unwrap()
            .iter()
            .all(|r| r.r_mc == Some(0.0)));
    }

    #[test]
    fn single_router_circuits_match_selection_ratio() {
        let sc = SimScenario {
            circuit_length: 1,
            ..scenario(Strategy::OpportunisticTor, 0.2)
        };
        let w = SimWorld::new(graph(30), &sc).unwrap();
        for r in run_circuit_rounds(&w, &sc).unwrap() {
            assert_eq!(Some(r.r_mr), r.r_mc);
        }
    }

    #[test]
    fn circuits_at_least_as_exposed_as_routers() {
        let sc = scenario(Strategy::OpportunisticTor, 0.2);
        let w = SimWorld::new(graph(30), &sc).unwrap();
        let rounds = run_circuit_rounds(&w, &sc).unwrap();
        for r in &rounds {
            assert!(r.r_mc.unwrap() >= r.r_mr);
        }
        let mean = mean_report(&rounds);
        assert!(mean.r_mc.unwrap() > mean.r_mr);
    }

    #[test]
    fn circuit_bandwidth_is_the_slowest_member() {
        let sc = scenario(Strategy::OpportunisticTor, 0.2);
        let w = SimWorld::new(graph(30), &sc).unwrap();
        let single = run_selection_rounds(&w, &sc).unwrap();
        let circuits = run_circuit_rounds(&w, &sc).unwrap();
        assert!(mean_report(&circuits).avg_bandwidth < mean_report(&single).avg_bandwidth);
    }
}
