//! Trust scores over hop-bounded friendship paths.
//!
//! The trust distance of a path is the product of its links' trust values;
//! the trust score `ts(i => j)` is the largest trust distance over acyclic
//! paths of at most `g` links. Because every factor lies in `[0, 1]`,
//! extending a path never raises its product, so a best-first search that
//! always expands the highest product settles each target with its optimum.
//! States are `(node, hops)`: a lower-product label may still be worth
//! expanding if it reached the node in fewer hops.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EntityId, MergedView, SocialGraph};
use crate::scalar::Scalar;

/// Default hop bound: friends and friends of friends.
pub const DEFAULT_MAX_HOPS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("hop bound must be at least 1")]
    ZeroHops,
    #[error("path is empty")]
    EmptyPath,
    #[error("no link from {from} to {to} on the path")]
    DisconnectedPath { from: EntityId, to: EntityId },
    #[error("path visits entity {0} twice")]
    CyclicPath(EntityId),
    #[error("trust value of link {from}->{to} has not been computed")]
    TrustUnset { from: EntityId, to: EntityId },
}

/// Trust distance `td` of a path and its complement, the distrust distance.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PathDistance<T> {
    pub td: T,
    pub utd: T,
}

impl<T: Scalar> PathDistance<T> {
    pub fn from_td(td: T) -> Self {
        PathDistance {
            td,
            utd: T::one() - td,
        }
    }
}

/// Product of merged trust values along `path`, given as the entity sequence
/// `[i, h1, ..., j]`. A single-entity path has distance 1.
pub fn trust_distance<T: Scalar>(
    graph: &SocialGraph<T>,
    path: &[EntityId],
) -> Result<PathDistance<T>, PropagationError> {
    let first = *path.first().ok_or(PropagationError::EmptyPath)?;
    if !graph.contains(first) {
        return Err(PropagationError::UnknownEntity(first));
    }
    for (k, id) in path.iter().enumerate() {
        if path[..k].contains(id) {
            return Err(PropagationError::CyclicPath(*id));
        }
    }
    let mut td = T::one();
    for w in path.windows(2) {
        let (from, to) = (w[0], w[1]);
        let tv = graph.merge_trust(from, to).map_err(|e| match e {
            crate::GraphError::TrustUnset { .. } => PropagationError::TrustUnset { from, to },
            _ => PropagationError::DisconnectedPath { from, to },
        })?;
        td = td * tv;
    }
    Ok(PathDistance::from_td(td))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrustScore<T> {
    pub ts: T,
    /// Length of the witness path.
    pub hops: usize,
    /// Best path from the source (exclusive) to the target (inclusive).
    pub path: Vec<EntityId>,
}

/// Trust scores of one source towards every member of its friendship circle.
#[derive(Clone, Debug, PartialEq)]
pub struct TrustScoreTable<T> {
    pub source: EntityId,
    pub max_hops: usize,
    pub scores: BTreeMap<EntityId, TrustScore<T>>,
}

impl<T: Scalar> TrustScoreTable<T> {
    pub fn ts(&self, target: EntityId) -> Option<T> {
        self.scores.get(&target).map(|s| s.ts)
    }

    pub fn get(&self, target: EntityId) -> Option<&TrustScore<T>> {
        self.scores.get(&target)
    }

    /// `||F_i||`.
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &TrustScore<T>)> {
        self.scores.iter().map(|(id, s)| (*id, s))
    }

    /// `||TF_i||` for threshold `ts_h`.
    pub fn trustworthy_count(&self, ts_h: T) -> usize {
        self.scores.values().filter(|s| s.ts >= ts_h).count()
    }
}

struct Label<T> {
    product: T,
    path: Vec<usize>,
}

impl<T: Scalar> Label<T> {
    fn hops(&self) -> usize {
        self.path.len()
    }
}

impl<T: Scalar> PartialEq for Label<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Label<T> {}

impl<T: Scalar> PartialOrd for Label<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Max-heap order: larger product first, then fewer hops, then the
// lexicographically smaller entity sequence (dense indices follow id order).
impl<T: Scalar> Ord for Label<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.product
            .partial_cmp(&other.product)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.hops().cmp(&self.hops()))
            .then_with(|| other.path.cmp(&self.path))
    }
}

fn search<T: Scalar>(
    view: &MergedView<T>,
    src: usize,
    max_hops: usize,
) -> Result<BTreeMap<EntityId, TrustScore<T>>, PropagationError> {
    let mut heap = BinaryHeap::new();
    // Fewest hops of any label expanded so far at each node.
    let mut expanded_hops = vec![usize::MAX; view.len()];
    expanded_hops[src] = 0;
    let mut scores = BTreeMap::new();
    let mut last_settled: Option<T> = None;

    let push_out = |heap: &mut BinaryHeap<Label<T>>, product: T, path: &[usize], node: usize| {
        for edge in view.out_edges(node) {
            if edge.target == src || path.contains(&edge.target) {
                continue;
            }
            let tv = edge.trust.ok_or(PropagationError::TrustUnset {
                from: view.id(node),
                to: view.id(edge.target),
            })?;
            let mut next = Vec::with_capacity(path.len() + 1);
            next.extend_from_slice(path);
            next.push(edge.target);
            heap.push(Label {
                product: product * tv,
                path: next,
            });
        }
        Ok(())
    };

    push_out(&mut heap, T::one(), &[], src)?;
    while let Some(label) = heap.pop() {
        let node = *label.path.last().expect("labels are non-empty");
        let hops = label.hops();
        if expanded_hops[node] <= hops {
            continue;
        }
        if expanded_hops[node] == usize::MAX {
            debug_assert!(
                last_settled.is_none_or(|p| label.product <= p),
                "settled products must not increase"
            );
            last_settled = Some(label.product);
            scores.insert(
                view.id(node),
                TrustScore {
                    ts: label.product,
                    hops,
                    path: label.path.iter().map(|&i| view.id(i)).collect(),
                },
            );
        }
        expanded_hops[node] = hops;
        if hops < max_hops {
            push_out(&mut heap, label.product, &label.path, node)?;
        }
    }
    Ok(scores)
}

/// Trust scores from `source` to every entity within `max_hops` links.
pub fn propagate<T: Scalar>(
    graph: &SocialGraph<T>,
    source: EntityId,
    max_hops: usize,
) -> Result<TrustScoreTable<T>, PropagationError> {
    if max_hops == 0 {
        return Err(PropagationError::ZeroHops);
    }
    let view = graph.merged();
    let src = view
        .index_of(source)
        .ok_or(PropagationError::UnknownEntity(source))?;
    Ok(TrustScoreTable {
        source,
        max_hops,
        scores: search(view, src, max_hops)?,
    })
}

/// [`propagate`] for every entity, computed in parallel.
pub fn propagate_all<T: Scalar>(
    graph: &SocialGraph<T>,
    max_hops: usize,
) -> Result<BTreeMap<EntityId, TrustScoreTable<T>>, PropagationError> {
    let view = graph.merged();
    view.ids()
        .par_iter()
        .map(|&id| propagate(graph, id, max_hops).map(|t| (id, t)))
        .collect()
}

/// CSV with header `source,target,ts,hops`, rows ordered by source then
/// target.
pub fn scores_csv<'a, T: Scalar>(tables: impl IntoIterator<Item = &'a TrustScoreTable<T>>) -> String {
    let mut out = String::from("source,target,ts,hops\n");
    for table in tables {
        for (target, s) in table.iter() {
            let _ = writeln!(out, "{},{},{},{}", table.source, target, s.ts.as_f64(), s.hops);
        }
    }
    out
}
