//! Multi-network friendship graph.
//!
//! Nodes are entities, each owning exactly one router with a bandwidth and a
//! malicious flag. Directed links `from -> to` mean "`from` trusts `to`" and
//! are keyed by `(from, to, network)`, so the same pair of entities may be
//! friends in several social networks at once. Trust computations work on a
//! merged view where parallel links collapse into one edge carrying the
//! highest per-network trust value.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::fuzzy::QualitativeClass;
use crate::scalar::Scalar;

/// Entity index, starting at 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a social network contributing links to the graph.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetworkId(pub u16);

impl fmt::Display for NetworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("unknown network {0}")]
    UnknownNetwork(NetworkId),
    #[error("entity {0} cannot befriend itself")]
    SelfLink(EntityId),
    #[error("entity ids start at 1")]
    ZeroEntityId,
    #[error("entity {0} is already registered")]
    DuplicateEntity(EntityId),
    #[error("entity {id} has invalid bandwidth {bandwidth}; must be positive and finite")]
    InvalidBandwidth { id: EntityId, bandwidth: f64 },
    #[error("no link from {from} to {to} in any network")]
    NoLink { from: EntityId, to: EntityId },
    #[error("trust value of link {from}->{to} in network {network} has not been computed")]
    TrustUnset {
        from: EntityId,
        to: EntityId,
        network: NetworkId,
    },
    #[error("trust value of link {from}->{to} is outside [0, 1]")]
    TrustOutOfRange { from: EntityId, to: EntityId },
    #[error("hop bound must be at least 1")]
    ZeroHops,
}

/// Social attributes measured on one link.
///
/// Quantitative values are raw, non-negative measurements (communication
/// frequency, friendship duration, ...). Qualitative values are already
/// classified into positive/neutral/negative.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributeProfile {
    pub quantitative: BTreeMap<String, f64>,
    pub qualitative: BTreeMap<String, QualitativeClass>,
}

impl AttributeProfile {
    pub fn is_empty(&self) -> bool {
        self.quantitative.is_empty() && self.qualitative.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FriendLink<T> {
    pub from: EntityId,
    pub to: EntityId,
    pub network: NetworkId,
    pub attributes: AttributeProfile,
    pub trust_value: Option<T>,
}

impl<T> FriendLink<T> {
    pub fn new(from: EntityId, to: EntityId, network: NetworkId) -> Self {
        FriendLink {
            from,
            to,
            network,
            attributes: AttributeProfile::default(),
            trust_value: None,
        }
    }

    pub fn with_quantitative(mut self, name: &str, raw: f64) -> Self {
        self.attributes.quantitative.insert(name.to_string(), raw);
        self
    }

    pub fn with_qualitative(mut self, name: &str, class: QualitativeClass) -> Self {
        self.attributes.qualitative.insert(name.to_string(), class);
        self
    }

    pub fn with_trust(mut self, tv: T) -> Self {
        self.trust_value = Some(tv);
        self
    }

    pub fn key(&self) -> LinkKey {
        LinkKey {
            from: self.from,
            to: self.to,
            network: self.network,
        }
    }
}

/// Unique key of a link: one link per `(from, to, network)` triple.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkKey {
    pub from: EntityId,
    pub to: EntityId,
    pub network: NetworkId,
}

/// An entity and the router it runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Entity {
    pub id: EntityId,
    /// Router bandwidth in bytes per second.
    pub bandwidth: f64,
    pub malicious: bool,
}

/// Edge of the merged (network-collapsed) view.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MergedEdge<T> {
    /// Dense index of the target entity.
    pub target: usize,
    /// Highest computed per-network trust value; `None` while any parallel
    /// link is still missing its trust value.
    pub trust: Option<T>,
}

/// Dense-index view with parallel links collapsed by the max rule.
#[derive(Clone, Debug)]
pub struct MergedView<T> {
    ids: Vec<EntityId>,
    index: HashMap<EntityId, usize>,
    out: Vec<Vec<MergedEdge<T>>>,
}

impl<T: Scalar> MergedView<T> {
    fn build(graph: &SocialGraph<T>) -> Self {
        let ids: Vec<EntityId> = graph.entities.keys().copied().collect();
        let index: HashMap<EntityId, usize> =
            ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut out: Vec<Vec<MergedEdge<T>>> = vec![Vec::new(); ids.len()];
        // Links are ordered by (from, to, network), so parallel links are
        // adjacent and targets come out sorted.
        let mut current: Option<(EntityId, EntityId, Option<T>, bool)> = None;
        let flush = |cur: Option<(EntityId, EntityId, Option<T>, bool)>,
                         out: &mut Vec<Vec<MergedEdge<T>>>| {
            if let Some((from, to, best, complete)) = cur {
                out[index[&from]].push(MergedEdge {
                    target: index[&to],
                    trust: if complete { best } else { None },
                });
            }
        };
        for link in graph.links.values() {
            match &mut current {
                Some((from, to, best, complete)) if *from == link.from && *to == link.to => {
                    match link.trust_value {
                        Some(tv) => *best = Some(best.map_or(tv, |b| b.max_of(tv))),
                        None => *complete = false,
                    }
                }
                _ => {
                    flush(current.take(), &mut out);
                    current = Some((
                        link.from,
                        link.to,
                        link.trust_value,
                        link.trust_value.is_some(),
                    ));
                }
            }
        }
        flush(current, &mut out);
        MergedView { ids, index, out }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: usize) -> EntityId {
        self.ids[idx]
    }

    pub fn ids(&self) -> &[EntityId] {
        &self.ids
    }

    pub fn index_of(&self, id: EntityId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn out_edges(&self, idx: usize) -> &[MergedEdge<T>] {
        &self.out[idx]
    }

    /// Dense indices of every entity reachable from `source` in at most
    /// `max_hops` links, excluding `source`, in ascending index order.
    pub fn reach_within(&self, source: usize, max_hops: usize) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.len()];
        depth[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut reached = Vec::new();
        while let Some(u) = queue.pop_front() {
            if depth[u] == max_hops {
                continue;
            }
            for edge in &self.out[u] {
                if depth[edge.target] == usize::MAX {
                    depth[edge.target] = depth[u] + 1;
                    reached.push(edge.target);
                    queue.push_back(edge.target);
                }
            }
        }
        reached.sort_unstable();
        reached
    }
}

/// The friendship circle of one entity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FriendshipCircle {
    pub source: EntityId,
    pub max_hops: usize,
    /// `members_by_hop[r - 1]` holds every entity at the end of some acyclic
    /// path of exactly `r` links. An entity may appear at several hops.
    pub members_by_hop: Vec<BTreeSet<EntityId>>,
    pub members: BTreeSet<EntityId>,
}

impl FriendshipCircle {
    /// `||F_i||`
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn hop(&self, r: usize) -> Option<&BTreeSet<EntityId>> {
        r.checked_sub(1).and_then(|i| self.members_by_hop.get(i))
    }
}

/// Directed, weighted, possibly cyclic friendship graph over several social
/// networks.
#[derive(Debug)]
pub struct SocialGraph<T> {
    entities: BTreeMap<EntityId, Entity>,
    networks: BTreeSet<NetworkId>,
    links: BTreeMap<LinkKey, FriendLink<T>>,
    merged: OnceLock<MergedView<T>>,
}

impl<T> Default for SocialGraph<T> {
    fn default() -> Self {
        SocialGraph {
            entities: BTreeMap::new(),
            networks: BTreeSet::new(),
            links: BTreeMap::new(),
            merged: OnceLock::new(),
        }
    }
}

impl<T: Clone> Clone for SocialGraph<T> {
    fn clone(&self) -> Self {
        SocialGraph {
            entities: self.entities.clone(),
            networks: self.networks.clone(),
            links: self.links.clone(),
            merged: OnceLock::new(),
        }
    }
}

impl<T: PartialEq> PartialEq for SocialGraph<T> {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities
            && self.networks == other.networks
            && self.links == other.links
    }
}

impl<T: Scalar> SocialGraph<T> {
    pub fn new() -> Self {
        Self::default()
    }

    fn invalidate(&mut self) {
        self.merged = OnceLock::new();
    }

    pub fn add_entity(&mut self, id: EntityId, bandwidth: f64) -> Result<(), GraphError> {
        if id.0 == 0 {
            return Err(GraphError::ZeroEntityId);
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(GraphError::InvalidBandwidth { id, bandwidth });
        }
        if self.entities.contains_key(&id) {
            return Err(GraphError::DuplicateEntity(id));
        }
        self.entities.insert(
            id,
            Entity {
                id,
                bandwidth,
                malicious: false,
            },
        );
        self.invalidate();
        Ok(())
    }

    pub fn add_network(&mut self, id: NetworkId) {
        self.networks.insert(id);
    }

    /// Inserts `link`, replacing (and returning) any link with the same
    /// `(from, to, network)` key.
    pub fn add_link(&mut self, link: FriendLink<T>) -> Result<Option<FriendLink<T>>, GraphError> {
        if link.from == link.to {
            return Err(GraphError::SelfLink(link.from));
        }
        for id in [link.from, link.to] {
            if !self.entities.contains_key(&id) {
                return Err(GraphError::UnknownEntity(id));
            }
        }
        if !self.networks.contains(&link.network) {
            return Err(GraphError::UnknownNetwork(link.network));
        }
        if let Some(tv) = link.trust_value {
            if !tv.in_unit_interval() {
                return Err(GraphError::TrustOutOfRange {
                    from: link.from,
                    to: link.to,
                });
            }
        }
        self.invalidate();
        Ok(self.links.insert(link.key(), link))
    }

    /// Stores a computed trust value on an existing link.
    pub fn set_trust(&mut self, key: LinkKey, tv: T) -> Result<(), GraphError> {
        if !tv.in_unit_interval() {
            return Err(GraphError::TrustOutOfRange {
                from: key.from,
                to: key.to,
            });
        }
        let link = self.links.get_mut(&key).ok_or(GraphError::NoLink {
            from: key.from,
            to: key.to,
        })?;
        link.trust_value = Some(tv);
        self.invalidate();
        Ok(())
    }

    pub fn set_malicious(&mut self, id: EntityId, malicious: bool) -> Result<(), GraphError> {
        let entity = self
            .entities
            .get_mut(&id)
            .ok_or(GraphError::UnknownEntity(id))?;
        entity.malicious = malicious;
        Ok(())
    }

    pub fn set_bandwidth(&mut self, id: EntityId, bandwidth: f64) -> Result<(), GraphError> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(GraphError::InvalidBandwidth { id, bandwidth });
        }
        let entity = self
            .entities
            .get_mut(&id)
            .ok_or(GraphError::UnknownEntity(id))?;
        entity.bandwidth = bandwidth;
        Ok(())
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(&id)
    }

    pub fn contains(&self, id: EntityId) -> bool {
        self.entities.contains_key(&id)
    }

    /// Entities in ascending id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn networks(&self) -> impl Iterator<Item = NetworkId> + '_ {
        self.networks.iter().copied()
    }

    /// Links in `(from, to, network)` order.
    pub fn links(&self) -> impl Iterator<Item = &FriendLink<T>> {
        self.links.values()
    }

    pub fn link(&self, key: LinkKey) -> Option<&FriendLink<T>> {
        self.links.get(&key)
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Links leaving `from`, across all networks.
    pub fn out_links(&self, from: EntityId) -> impl Iterator<Item = &FriendLink<T>> {
        let lo = LinkKey {
            from,
            to: EntityId(0),
            network: NetworkId(0),
        };
        self.links
            .range(lo..)
            .take_while(move |(k, _)| k.from == from)
            .map(|(_, l)| l)
    }

    /// Lazily built merged view; rebuilt after any mutation.
    pub fn merged(&self) -> &MergedView<T> {
        self.merged.get_or_init(|| MergedView::build(self))
    }

    /// `tv_{i->j}`: the highest per-network trust value over every network in
    /// which `i` befriends `j`.
    pub fn merge_trust(&self, i: EntityId, j: EntityId) -> Result<T, GraphError> {
        let lo = LinkKey {
            from: i,
            to: j,
            network: NetworkId(0),
        };
        let mut best: Option<T> = None;
        for (key, link) in self.links.range(lo..).take_while(|(k, _)| k.from == i && k.to == j) {
            let tv = link.trust_value.ok_or(GraphError::TrustUnset {
                from: key.from,
                to: key.to,
                network: key.network,
            })?;
            best = Some(best.map_or(tv, |b| b.max_of(tv)));
        }
        best.ok_or(GraphError::NoLink { from: i, to: j })
    }

    /// Members of `F_i` within `max_hops`, without the per-hop breakdown.
    pub fn circle_members(&self, i: EntityId, max_hops: usize) -> Result<Vec<EntityId>, GraphError> {
        if max_hops == 0 {
            return Err(GraphError::ZeroHops);
        }
        let view = self.merged();
        let src = view.index_of(i).ok_or(GraphError::UnknownEntity(i))?;
        Ok(view
            .reach_within(src, max_hops)
            .into_iter()
            .map(|idx| view.id(idx))
            .collect())
    }

    /// Full friendship circle including the per-hop sets `F_{i,r}`.
    ///
    /// The per-hop sets enumerate acyclic paths, so cost grows as
    /// `degree^max_hops`; use [`circle_members`](Self::circle_members) when
    /// only the union is needed.
    pub fn friendship_circle(&self, i: EntityId, max_hops: usize) -> Result<FriendshipCircle, GraphError> {
        if max_hops == 0 {
            return Err(GraphError::ZeroHops);
        }
        let view = self.merged();
        let src = view.index_of(i).ok_or(GraphError::UnknownEntity(i))?;
        let mut layers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); max_hops];
        let mut on_path = vec![false; view.len()];
        on_path[src] = true;
        simple_path_layers(view, src, 0, max_hops, &mut on_path, &mut layers);

        let members_by_hop: Vec<BTreeSet<EntityId>> = layers
            .iter()
            .map(|layer| layer.iter().map(|&idx| view.id(idx)).collect())
            .collect();
        let members = members_by_hop.iter().flatten().copied().collect();
        Ok(FriendshipCircle {
            source: i,
            max_hops,
            members_by_hop,
            members,
        })
    }
}

fn simple_path_layers<T: Scalar>(
    view: &MergedView<T>,
    node: usize,
    depth: usize,
    max_hops: usize,
    on_path: &mut [bool],
    layers: &mut [BTreeSet<usize>],
) {
    if depth == max_hops {
        return;
    }
    for edge in view.out_edges(node) {
        if on_path[edge.target] {
            continue;
        }
        layers[depth].insert(edge.target);
        on_path[edge.target] = true;
        simple_path_layers(view, edge.target, depth + 1, max_hops, on_path, layers);
        on_path[edge.target] = false;
    }
}
