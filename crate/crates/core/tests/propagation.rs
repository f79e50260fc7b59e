mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trustroute::{propagate, EntityId, Rational};

use common::{awkward_tv, brute_force_scores, random_graph};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_exhaustive_paths(seed in any::<u64>(), n in 2u32..=10, links in 0usize..=30, hops in 1usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, links, awkward_tv);
        for src in 1..=n {
            let table = propagate(&g, EntityId(src), hops).unwrap();
            let got: Vec<(EntityId, f64)> = table.iter().map(|(id, s)| (id, s.ts)).collect();
            let want: Vec<(EntityId, f64)> = brute_force_scores(&g, EntityId(src), hops).into_iter().collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn exact_rationals_match_exhaustive_paths(seed in any::<u64>(), n in 2u32..=8, links in 0usize..=24, hops in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, links, |r: &mut ChaCha8Rng| {
            use rand::Rng;
            Rational::new(r.random_range(0..=10), 10)
        });
        for src in 1..=n {
            let table = propagate(&g, EntityId(src), hops).unwrap();
            let got: Vec<(EntityId, Rational)> = table.iter().map(|(id, s)| (id, s.ts)).collect();
            let want: Vec<(EntityId, Rational)> = brute_force_scores(&g, EntityId(src), hops).into_iter().collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn reported_path_realises_the_score(seed in any::<u64>(), n in 2u32..=10, links in 0usize..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, links, awkward_tv);
        let table = propagate(&g, EntityId(1), 3).unwrap();
        for (target, s) in table.iter() {
            let mut full = vec![EntityId(1)];
            full.extend(&s.path);
            prop_assert_eq!(*full.last().unwrap(), target);
            prop_assert_eq!(s.hops, s.path.len());
            prop_assert!(s.hops <= 3);
            let td = trustroute::propagation::trust_distance(&g, &full).unwrap();
            prop_assert_eq!(td.td, s.ts);
        }
    }

    #[test]
    fn circle_is_the_reachable_set(seed in any::<u64>(), n in 2u32..=10, links in 0usize..=30, hops in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, links, awkward_tv);
        let table = propagate(&g, EntityId(1), hops).unwrap();
        let members: Vec<EntityId> = table.iter().map(|(id, _)| id).collect();
        prop_assert_eq!(members, g.circle_members(EntityId(1), hops).unwrap());
    }

    #[test]
    fn larger_hop_bounds_never_lower_scores(seed in any::<u64>(), n in 2u32..=10, links in 0usize..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, links, awkward_tv);
        let short = propagate(&g, EntityId(1), 2).unwrap();
        let long = propagate(&g, EntityId(1), 4).unwrap();
        for (id, s) in short.iter() {
            prop_assert!(long.ts(id).unwrap() >= s.ts);
        }
    }
}

#[test]
fn oracle_graphs_have_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let g = random_graph(&mut rng, 10, 30, awkward_tv);
    assert!(g.link_count() > 20);
    assert!(brute_force_scores(&g, EntityId(1), 9).len() > 3);
}
