//! Reference implementations shared by the integration tests and the
//! acceptance run. Slow and obvious on purpose.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use trustroute::{EntityId, FriendLink, NetworkId, Scalar, SocialGraph};

/// Best product over every simple path of at most `max_hops` links from
/// `source`, found by exhaustive depth-first enumeration.
pub fn brute_force_scores<T: Scalar>(
    graph: &SocialGraph<T>,
    source: EntityId,
    max_hops: usize,
) -> BTreeMap<EntityId, T> {
    let mut adj: BTreeMap<EntityId, BTreeMap<EntityId, T>> = BTreeMap::new();
    for l in graph.links() {
        let tv = l.trust_value.expect("trust set");
        let slot = adj.entry(l.from).or_default().entry(l.to).or_insert(tv);
        if tv > *slot {
            *slot = tv;
        }
    }
    let mut best = BTreeMap::new();
    let mut path = vec![source];
    dfs(&adj, &mut path, T::one(), max_hops, &mut best);
    best
}

fn dfs<T: Scalar>(
    adj: &BTreeMap<EntityId, BTreeMap<EntityId, T>>,
    path: &mut Vec<EntityId>,
    product: T,
    left: usize,
    best: &mut BTreeMap<EntityId, T>,
) {
    if left == 0 {
        return;
    }
    let here = *path.last().unwrap();
    let Some(out) = adj.get(&here) else { return };
    for (&next, &tv) in out {
        if path.contains(&next) {
            continue;
        }
        let p = product * tv;
        let slot = best.entry(next).or_insert(p);
        if p > *slot {
            *slot = p;
        }
        path.push(next);
        dfs(adj, path, p, left - 1, best);
        path.pop();
    }
}

/// Random graph on ids `1..=n` with up to `links` links spread over two
/// networks; trust values come from `tv`.
pub fn random_graph<T: Scalar, R: Rng>(
    rng: &mut R,
    n: u32,
    links: usize,
    mut tv: impl FnMut(&mut R) -> T,
) -> SocialGraph<T> {
    let mut g = SocialGraph::new();
    g.add_network(NetworkId(1));
    g.add_network(NetworkId(2));
    for i in 1..=n {
        g.add_entity(EntityId(i), rng.random_range(1.0..100.0)).unwrap();
    }
    for _ in 0..links {
        let from = rng.random_range(1..=n);
        let to = rng.random_range(1..=n);
        if from == to {
            continue;
        }
        let network = NetworkId(rng.random_range(1..=2));
        let t = tv(rng);
        let link = FriendLink::new(EntityId(from), EntityId(to), network).with_trust(t);
        if g.link(link.key()).is_none() {
            g.add_link(link).unwrap();
        }
    }
    g
}

/// Trust values that exercise ties and the ends of the range.
pub fn awkward_tv<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..6) {
        0 => 0.0,
        1 => 1.0,
        2 => 0.5,
        3 => 0.25,
        _ => rng.random(),
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]`. The first few levels
/// always split, so a shape hidden between the coarse sample points is not
/// mistaken for zero.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        let forced = depth > 60 - 8;
        if depth == 0 || (!forced && delta.abs() <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 60)
}

/// Pearson chi-square goodness of fit. Cells with expected count below 5 are
/// pooled; cells with probability 0 must stay empty. Returns the p-value.
pub fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let n = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            if c > 0 {
                return 0.0;
            }
            continue;
        }
        let exp = p * n;
        if exp < 5.0 {
            pool_obs += c as f64;
            pool_exp += exp;
            continue;
        }
        stat += (c as f64 - exp).powi(2) / exp;
        cells += 1;
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}
