//! Router and circuit selection.
//!
//! In trust mode a user only picks routers run by members of their
//! trustworthy friendship circle (trust score at least `ts_h`), each with
//! weight `(1 - omega) * ts + omega * BW`, where `BW` is bandwidth divided by
//! the largest bandwidth among the candidates. The baseline mode picks any
//! router with probability proportional to bandwidth.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use thiserror::Error;

use crate::graph::{EntityId, SocialGraph};
use crate::propagation::TrustScoreTable;
use crate::scalar::Scalar;

pub const DEFAULT_CIRCUIT_LENGTH: usize = 3;

/// Rejections tolerated by [`CoupledSampler`] before it samples the target
/// distribution directly.
const MAX_REJECTIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("no candidate router for entity {0} (trust threshold filters out the whole circle?)")]
    EmptyCandidateSet(EntityId),
    #[error("router set is empty")]
    EmptySet,
    #[error("all candidate weights are zero")]
    ZeroDenominator,
    #[error("entity {0} is not a candidate")]
    NotACandidate(EntityId),
    #[error("circuit needs {needed} distinct routers with positive weight, only {available} available")]
    InsufficientCandidates { needed: usize, available: usize },
    #[error("invalid selection policy: {0}")]
    InvalidPolicy(String),
    #[error("router {id} has invalid bandwidth {bandwidth}")]
    InvalidBandwidth { id: EntityId, bandwidth: f64 },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Bandwidth-proportional choice over every router.
    TorBaseline,
    /// Trust-weighted choice over the trustworthy friendship circle.
    STor,
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMode::TorBaseline => "tor",
            SelectionMode::STor => "stor",
        })
    }
}

impl FromStr for SelectionMode {
    type Err = SelectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tor" | "tor_baseline" => Ok(SelectionMode::TorBaseline),
            "stor" => Ok(SelectionMode::STor),
            _ => Err(SelectionError::InvalidPolicy(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SelectionPolicy {
    pub mode: SelectionMode,
    /// Weight of bandwidth against trust score, in `[0, 1]`.
    pub omega: f64,
    /// Trust threshold `ts_h` for the trustworthy friendship circle.
    pub ts_h: f64,
    pub circuit_length: usize,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        SelectionPolicy {
            mode: SelectionMode::STor,
            omega: 0.0,
            ts_h: 0.0,
            circuit_length: DEFAULT_CIRCUIT_LENGTH,
        }
    }
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let bad = |m: String| Err(SelectionError::InvalidPolicy(m));
        if !(0.0..=1.0).contains(&self.omega) {
            return bad(format!("omega {} outside [0, 1]", self.omega));
        }
        if !(0.0..=1.0).contains(&self.ts_h) {
            return bad(format!("ts_h {} outside [0, 1]", self.ts_h));
        }
        if self.circuit_length == 0 {
            return bad("circuit length must be positive".into());
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Candidate {
    pub id: EntityId,
    pub ts: f64,
    pub bandwidth: f64,
    /// `BW_j`: bandwidth over the largest candidate bandwidth.
    pub normalized_bandwidth: f64,
    pub malicious: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    pub source: EntityId,
    pub mode: SelectionMode,
    /// Ordered by entity id.
    pub members: Vec<Candidate>,
    /// `||F_i||` before the threshold was applied.
    pub circle_size: usize,
}

impl CandidateSet {
    /// `||TF_i||` in trust mode, router count in baseline mode.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, id: EntityId) -> Option<usize> {
        self.members.binary_search_by_key(&id, |c| c.id).ok()
    }

    /// Unnormalised selection weights in member order.
    pub fn weights(&self, omega: f64) -> Vec<f64> {
        self.members
            .iter()
            .map(|c| match self.mode {
                SelectionMode::TorBaseline => c.bandwidth,
                SelectionMode::STor => (1.0 - omega) * c.ts + omega * c.normalized_bandwidth,
            })
            .collect()
    }

    pub fn probabilities(&self, omega: f64) -> Result<Vec<f64>, SelectionError> {
        let w = self.weights(omega);
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(SelectionError::ZeroDenominator);
        }
        Ok(w.into_iter().map(|x| x / total).collect())
    }

    fn sampler(&self, omega: f64) -> Result<WeightedIndex<f64>, SelectionError> {
        if self.is_empty() {
            return Err(SelectionError::EmptyCandidateSet(self.source));
        }
        WeightedIndex::new(self.weights(omega)).map_err(|_| SelectionError::ZeroDenominator)
    }
}

fn check_bandwidth(id: EntityId, bandwidth: f64) -> Result<(), SelectionError> {
    if bandwidth.is_finite() && bandwidth > 0.0 {
        Ok(())
    } else {
        Err(SelectionError::InvalidBandwidth { id, bandwidth })
    }
}

/// Candidate routers for `scores.source` under `policy`.
pub fn build_candidates<T: Scalar>(
    graph: &SocialGraph<T>,
    scores: &TrustScoreTable<T>,
    policy: &SelectionPolicy,
) -> Result<CandidateSet, SelectionError> {
    policy.validate()?;
    let mut members = Vec::new();
    match policy.mode {
        SelectionMode::TorBaseline => {
            for e in graph.entities() {
                check_bandwidth(e.id, e.bandwidth)?;
                members.push(Candidate {
                    id: e.id,
                    ts: scores.ts(e.id).map_or(0.0, Scalar::as_f64),
                    bandwidth: e.bandwidth,
                    normalized_bandwidth: 0.0,
                    malicious: e.malicious,
                });
            }
        }
        SelectionMode::STor => {
            for (id, score) in scores.iter() {
                let ts = score.ts.as_f64();
                if ts < policy.ts_h {
                    continue;
                }
                let e = graph.entity(id).ok_or(SelectionError::NotACandidate(id))?;
                check_bandwidth(id, e.bandwidth)?;
                members.push(Candidate {
                    id,
                    ts,
                    bandwidth: e.bandwidth,
                    normalized_bandwidth: 0.0,
                    malicious: e.malicious,
                });
            }
        }
    }
    if members.is_empty() {
        return Err(SelectionError::EmptyCandidateSet(scores.source));
    }
    let max_bw = members.iter().map(|c| c.bandwidth).fold(0.0, f64::max);
    for c in &mut members {
        c.normalized_bandwidth = c.bandwidth / max_bw;
    }
    Ok(CandidateSet {
        source: scores.source,
        mode: policy.mode,
        members,
        circle_size: scores.len(),
    })
}

/// Probability that `j` is chosen from `candidates`.
pub fn selection_probability(
    candidates: &CandidateSet,
    j: EntityId,
    omega: f64,
) -> Result<f64, SelectionError> {
    let pos = candidates
        .position(j)
        .ok_or(SelectionError::NotACandidate(j))?;
    Ok(candidates.probabilities(omega)?[pos])
}

pub fn select_router<R: Rng + ?Sized>(
    candidates: &CandidateSet,
    omega: f64,
    rng: &mut R,
) -> Result<EntityId, SelectionError> {
    let dist = candidates.sampler(omega)?;
    Ok(candidates.members[dist.sample(rng)].id)
}

/// Bandwidth-proportional choice among `(router, bandwidth)` pairs.
pub fn select_tor_baseline<R: Rng + ?Sized>(
    routers: &[(EntityId, f64)],
    rng: &mut R,
) -> Result<EntityId, SelectionError> {
    if routers.is_empty() {
        return Err(SelectionError::EmptySet);
    }
    for &(id, b) in routers {
        check_bandwidth(id, b)?;
    }
    let dist = WeightedIndex::new(routers.iter().map(|r| r.1)).map_err(|_| SelectionError::ZeroDenominator)?;
    Ok(routers[dist.sample(rng)].0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    /// Entry, middle(s), exit.
    pub routers: Vec<EntityId>,
    /// Lowest member bandwidth.
    pub bandwidth: f64,
    /// True when any member is malicious.
    pub malicious: bool,
}

/// Draws `policy.circuit_length` distinct routers one after another, each
/// pick renormalising the weights of those left.
pub fn build_circuit<R: Rng + ?Sized>(
    candidates: &CandidateSet,
    policy: &SelectionPolicy,
    rng: &mut R,
) -> Result<Circuit, SelectionError> {
    policy.validate()?;
    let weights = candidates.weights(policy.omega);
    let available = weights.iter().filter(|&&w| w > 0.0).count();
    let needed = policy.circuit_length;
    if available < needed {
        return Err(SelectionError::InsufficientCandidates { needed, available });
    }
    let mut dist = candidates.sampler(policy.omega)?;
    let mut routers = Vec::with_capacity(needed);
    let mut bandwidth = f64::INFINITY;
    let mut malicious = false;
    for k in 0..needed {
        let idx = dist.sample(rng);
        let c = &candidates.members[idx];
        routers.push(c.id);
        bandwidth = bandwidth.min(c.bandwidth);
        malicious |= c.malicious;
        if k + 1 < needed {
            dist.update_weights(&[(idx, &0.0)])
                .expect("positive weight remains");
        }
    }
    Ok(Circuit {
        routers,
        bandwidth,
        malicious,
    })
}

/// Samples a filtered candidate set through the unfiltered one.
///
/// Each draw proposes from the whole circle and accepts with a probability
/// that makes the accepted draws follow the filtered set's own weights
/// exactly. Fed the same random stream, samplers built for different
/// thresholds therefore agree on every draw that lands in both filtered sets,
/// so comparisons across thresholds only see the effect of the candidates
/// that were removed.
#[derive(Clone, Debug)]
pub struct CoupledSampler {
    proposal: WeightedIndex<f64>,
    /// Per proposal member: filtered position and acceptance probability.
    accept: Vec<Option<(usize, f64)>>,
    target: WeightedIndex<f64>,
    target_weights: Vec<f64>,
}

impl CoupledSampler {
    /// `filtered` must be a subset of `full`, both built in the same mode.
    pub fn new(full: &CandidateSet, filtered: &CandidateSet, omega: f64) -> Result<Self, SelectionError> {
        let wf = full.weights(omega);
        let wt = filtered.weights(omega);
        let proposal = full.sampler(omega)?;
        let target = filtered.sampler(omega)?;
        let mut accept = vec![None; full.len()];
        let mut c: f64 = 0.0;
        for (t, cand) in filtered.members.iter().enumerate() {
            let f = full.position(cand.id).ok_or(SelectionError::NotACandidate(cand.id))?;
            if wt[t] > 0.0 {
                // A positive target weight implies a positive proposal weight
                // in both modes.
                let ratio = wt[t] / wf[f];
                c = c.max(ratio);
                accept[f] = Some((t, ratio));
            }
        }
        for (_, ratio) in accept.iter_mut().flatten() {
            *ratio /= c;
        }
        Ok(CoupledSampler {
            proposal,
            accept,
            target,
            target_weights: wt,
        })
    }

    pub fn positive_targets(&self) -> usize {
        self.target_weights.iter().filter(|&&w| w > 0.0).count()
    }

    /// Position in the filtered set, skipping positions in `taken`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, taken: &[usize]) -> usize {
        for _ in 0..MAX_REJECTIONS {
            let f = self.proposal.sample(rng);
            if let Some((t, ratio)) = self.accept[f] {
                if !taken.contains(&t) && (ratio >= 1.0 || rng.random::<f64>() < ratio) {
                    return t;
                }
            }
        }
        loop {
            let t = self.target.sample(rng);
            if !taken.contains(&t) {
                return t;
            }
        }
    }

    /// `length` distinct filtered positions, in pick order.
    pub fn sample_circuit<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        length: usize,
    ) -> Result<Vec<usize>, SelectionError> {
        let available = self.positive_targets();
        if available < length {
            return Err(SelectionError::InsufficientCandidates {
                needed: length,
                available,
            });
        }
        let mut taken = Vec::with_capacity(length);
        for _ in 0..length {
            let t = self.sample(rng, &taken);
            taken.push(t);
        }
        Ok(taken)
    }
}
