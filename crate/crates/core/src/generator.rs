//! Synthetic friendship graphs.
//!
//! Directed edges are independent: the pair `(i, j)` is linked when a uniform
//! variate `u_ij`, fixed by the seed, falls below the edge probability `p`.
//! Since the variates do not depend on `p`, raising `p` only ever adds edges,
//! which makes circle size monotone in `p` and lets the calibrated variant
//! bisect for the `p` that hits a target mean circle fraction.
//!
//! Every link gets `freq` (contacts, `(0, 100]`) and `time` (days known,
//! `(0, 3650]`) measurements, a per-link `relationship` class and the
//! target's own `major` class, so an entity's trustworthiness is partly a
//! property of the entity and partly of the friendship.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fuzzy::QualitativeClass;
use crate::graph::{EntityId, FriendLink, NetworkId, SocialGraph};
use crate::rng::{stream, Purpose};
use crate::scalar::Scalar;

/// Default upper bound on router bandwidth: 10 MB/s.
pub const DEFAULT_BANDWIDTH_MAX: f64 = 10_000_000.0;
pub const DEFAULT_CIRCLE_FRACTION: f64 = 0.8;

const BISECTION_STEPS: usize = 40;
const FREQ_MAX: f64 = 100.0;
const TIME_MAX: f64 = 3650.0;
/// Chance that a link also appears in a second network, when there are
/// several.
const DUPLICATE_LINK_RATE: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidGeneratorParams(String),
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    /// Independent directed edges with probability `p`.
    ErdosRenyi { p: f64 },
    /// Edge probability tuned so the mean `||F_i|| / n` reaches
    /// `target_fraction`.
    Calibrated { target_fraction: f64 },
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec::Calibrated {
            target_fraction: DEFAULT_CIRCLE_FRACTION,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::ErdosRenyi { p } => write!(f, "erdos:{p}"),
            GeneratorSpec::Calibrated { target_fraction } => write!(f, "calibrated:{target_fraction}"),
        }
    }
}

/// Parses `erdos:<p>` or `calibrated:<fraction>`; bare `calibrated` uses the
/// default fraction.
impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeneratorError::InvalidGeneratorParams(format!("cannot parse generator `{s}`"));
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let value = arg.map(|a| a.parse::<f64>().map_err(|_| bad())).transpose()?;
        let spec = match (kind, value) {
            ("erdos", Some(p)) => GeneratorSpec::ErdosRenyi { p },
            ("calibrated", v) => GeneratorSpec::Calibrated {
                target_fraction: v.unwrap_or(DEFAULT_CIRCLE_FRACTION),
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        match *self {
            GeneratorSpec::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => Err(
                GeneratorError::InvalidGeneratorParams(format!("edge probability {p} outside [0, 1]")),
            ),
            GeneratorSpec::Calibrated { target_fraction: t } if !(t > 0.0 && t <= 1.0) => Err(
                GeneratorError::InvalidGeneratorParams(format!("circle fraction {t} outside (0, 1]")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub spec: GeneratorSpec,
    pub bandwidth_max: f64,
    pub networks: u16,
    /// Hop bound used when measuring circle size.
    pub max_hops: usize,
}

impl GeneratorConfig {
    pub fn new(n: usize, spec: GeneratorSpec) -> Self {
        GeneratorConfig {
            n,
            spec,
            bandwidth_max: DEFAULT_BANDWIDTH_MAX,
            networks: 1,
            max_hops: crate::propagation::DEFAULT_MAX_HOPS,
        }
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: String| Err(GeneratorError::InvalidGeneratorParams(m));
        if self.n < 2 {
            return bad(format!("need at least 2 entities, got {}", self.n));
        }
        if self.n > u32::MAX as usize {
            return bad(format!("{} entities do not fit entity ids", self.n));
        }
        if !(self.bandwidth_max.is_finite() && self.bandwidth_max > 0.0) {
            return bad(format!("bandwidth bound {} must be positive", self.bandwidth_max));
        }
        if self.networks == 0 {
            return bad("need at least one network".into());
        }
        if self.max_hops == 0 {
            return bad("hop bound must be at least 1".into());
        }
        self.spec.validate()
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GenerationReport {
    pub edge_probability: f64,
    /// Achieved mean `||F_i|| / n`.
    pub mean_circle_fraction: f64,
}

/// Pairwise edge variates in `(i, j)` row order, `j != i`.
struct EdgeDraws {
    n: usize,
    u: Vec<f64>,
}

impl EdgeDraws {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = stream(seed, Purpose::Edges, 0);
        let u = (0..n * (n - 1)).map(|_| rng.random::<f64>()).collect();
        EdgeDraws { n, u }
    }

    fn adjacency(&self, p: f64) -> Vec<Vec<usize>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let row = &self.u[i * (n - 1)..(i + 1) * (n - 1)];
                row.iter()
                    .enumerate()
                    .filter(|(_, &u)| u < p)
                    .map(|(k, _)| if k < i { k } else { k + 1 })
                    .collect()
            })
            .collect()
    }
}

fn mean_circle_fraction(adj: &[Vec<usize>], max_hops: usize) -> f64 {
    let n = adj.len();
    let total: usize = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], VecDeque::new()),
            |(depth, queue), src| {
                depth.fill(usize::MAX);
                depth[src] = 0;
                queue.clear();
                queue.push_back(src);
                let mut reached = 0;
                while let Some(u) = queue.pop_front() {
                    if depth[u] == max_hops {
                        continue;
                    }
                    for &v in &adj[u] {
                        if depth[v] == usize::MAX {
                            depth[v] = depth[u] + 1;
                            reached += 1;
                            queue.push_back(v);
                        }
                    }
                }
                reached
            },
        )
        .sum();
    total as f64 / (n * n) as f64
}

fn random_class(rng: &mut impl Rng) -> QualitativeClass {
    QualitativeClass::ALL[rng.random_range(0..3)]
}

/// Builds a graph with attributes but no trust values; run
/// [`compute_link_trust`](crate::fuzzy::compute_link_trust) on it next.
pub fn generate_graph<T: Scalar>(
    config: &GeneratorConfig,
    seed: u64,
) -> Result<(SocialGraph<T>, GenerationReport), GeneratorError> {
    config.validate()?;
    let n = config.n;
    let draws = EdgeDraws::new(n, seed);
    let p = match config.spec {
        GeneratorSpec::ErdosRenyi { p } => p,
        GeneratorSpec::Calibrated { target_fraction } => {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if mean_circle_fraction(&draws.adjacency(mid), config.max_hops) >= target_fraction {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let adj = draws.adjacency(p);
    let report = GenerationReport {
        edge_probability: p,
        mean_circle_fraction: mean_circle_fraction(&adj, config.max_hops),
    };

    let mut graph = SocialGraph::new();
    let mut bw_rng = stream(seed, Purpose::Bandwidth, 0);
    let mut attr_rng = stream(seed, Purpose::Attributes, 0);
    let majors: Vec<QualitativeClass> = (0..n).map(|_| random_class(&mut attr_rng)).collect();
    for i in 0..n {
        let bandwidth = config.bandwidth_max * (1.0 - bw_rng.random::<f64>());
        graph
            .add_entity(EntityId(i as u32 + 1), bandwidth)
            .expect("fresh ids and positive bandwidth");
    }
    for net in 1..=config.networks {
        graph.add_network(NetworkId(net));
    }
    let make_link = |from: usize, to: usize, network: u16, rng: &mut rand_chacha::ChaCha8Rng| {
        FriendLink::new(EntityId(from as u32 + 1), EntityId(to as u32 + 1), NetworkId(network))
            .with_quantitative("freq", FREQ_MAX * (1.0 - rng.random::<f64>()))
            .with_quantitative("time", TIME_MAX * (1.0 - rng.random::<f64>()))
            .with_qualitative("major", majors[to])
            .with_qualitative("relationship", random_class(rng))
    };
    for (i, targets) in adj.iter().enumerate() {
        for &j in targets {
            let k = config.networks;
            let net = if k == 1 { 1 } else { attr_rng.random_range(1..=k) };
            let link = make_link(i, j, net, &mut attr_rng);
            graph.add_link(link).expect("valid generated link");
            if k > 1 && attr_rng.random::<f64>() < DUPLICATE_LINK_RATE {
                let other = (net % k) + 1;
                let link = make_link(i, j, other, &mut attr_rng);
                graph.add_link(link).expect("valid generated link");
            }
        }
    }
    Ok((graph, report))
}
