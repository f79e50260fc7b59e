use proptest::prelude::*;
use trustroute::generator::GeneratorConfig;
use trustroute::propagation::scores_csv;
use trustroute::sim::{
    cdf_csv, generate_world_graph, rounds_csv, run_circuit_rounds, run_selection_rounds, CorrelationCase, SimWorld,
};
use trustroute::{
    compute_link_trust, generate_graph, parse_graph, propagate_all, write_graph, FuzzyRuleSet, Graph, GeneratorSpec,
    SimScenario, Strategy,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_graphs_round_trip(seed in any::<u64>(), n in 2usize..40, p in 0.0..0.5f64, networks in 1u16..=3) {
        let config = GeneratorConfig {
            networks,
            ..GeneratorConfig::new(n, GeneratorSpec::ErdosRenyi { p })
        };
        let (mut g, _) = generate_graph::<f64>(&config, seed).unwrap();
        compute_link_trust(&mut g, &FuzzyRuleSet::major_relationship()).unwrap();
        let text = write_graph(&g);
        let back: Graph = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn generated_trust_values_are_in_range(seed in any::<u64>()) {
        let config = GeneratorConfig::new(30, GeneratorSpec::ErdosRenyi { p: 0.2 });
        let (mut g, _) = generate_graph::<f64>(&config, seed).unwrap();
        compute_link_trust(&mut g, &FuzzyRuleSet::major_relationship()).unwrap();
        for l in g.links() {
            let tv = l.trust_value.unwrap();
            prop_assert!((0.0..=1.0).contains(&tv));
        }
    }
}

fn outputs(scenario: &SimScenario) -> Vec<String> {
    let rules = FuzzyRuleSet::major_relationship();
    let (graph, _) = generate_world_graph(scenario, &rules).unwrap();
    let text = write_graph(&graph);
    let scores = scores_csv(propagate_all(&graph, scenario.max_hops).unwrap().values());
    let world = SimWorld::new(graph, scenario).unwrap();
    let sel = run_selection_rounds(&world, scenario).unwrap();
    let circ = run_circuit_rounds(&world, scenario).unwrap();
    let r_mr: Vec<f64> = sel.iter().map(|r| r.r_mr).collect();
    vec![text, scores, rounds_csv(&sel), rounds_csv(&circ), cdf_csv(&r_mr)]
}

#[test]
fn every_strategy_and_case_is_reproducible() {
    for strategy in Strategy::ALL {
        for case in [CorrelationCase::None, CorrelationCase::Best, CorrelationCase::Worst] {
            let s = SimScenario {
                strategy,
                case,
                n: 80,
                rounds: 12,
                draws: 150,
                omega: 0.4,
                ts_h: 0.02,
                seed: 11,
                ..Default::default()
            };
            assert_eq!(outputs(&s), outputs(&s), "{strategy} {case}");
        }
    }
}

#[test]
fn seeds_change_outputs() {
    let a = SimScenario {
        n: 60,
        rounds: 5,
        draws: 50,
        ..Default::default()
    };
    let b = SimScenario { seed: a.seed + 1, ..a.clone() };
    assert_ne!(outputs(&a), outputs(&b));
}
