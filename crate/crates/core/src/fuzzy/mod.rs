//! Input-independent fuzzy model turning social attributes into a per-link
//! trust value.
//!
//! Quantitative attributes (communication frequency, friendship duration, ...)
//! are normalised and combined into a single crisp input `E` in `[0, 1]`.
//! Every qualitative attribute then acts as its own input fuzzy set: its value
//! (positive, neutral or negative) selects exactly one membership function,
//! `E` is graded against it, and the grade truncates the output membership
//! picked by the matching rule. The trust value is the centre of mass of the
//! union of the truncated shapes, with a per-class density making each output
//! class weigh the same.

mod defuzz;
mod membership;
mod rules;

pub use defuzz::{
    aggregate_quantitative, defuzzify, defuzzify_rules, mass_derivatives, truncated_mass,
    QualitativeAssignment, QuantitativeAttribute, QuantitativeInput, TruncatedMass,
};
pub use membership::{eval_input_membership, eval_output_membership, TriangularMembership};
pub use rules::{AttributeRule, FuzzyRuleSet, RuleKind};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{FriendLink, LinkKey, NetworkId, SocialGraph};
use crate::scalar::Scalar;
use crate::{EntityId, Error};

/// Qualitative value class of an attribute (input fuzzy set index `p`).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QualitativeClass {
    Positive,
    Neutral,
    Negative,
}

impl QualitativeClass {
    pub const ALL: [QualitativeClass; 3] = [Self::Positive, Self::Neutral, Self::Negative];

    /// `p` in 1..=3.
    pub fn from_index(p: u8) -> Result<Self, FuzzyError> {
        match p {
            1 => Ok(Self::Positive),
            2 => Ok(Self::Neutral),
            3 => Ok(Self::Negative),
            other => Err(FuzzyError::UnknownClassIndex(other)),
        }
    }

    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "POSITIVE",
            Self::Neutral => "NEUTRAL",
            Self::Negative => "NEGATIVE",
        }
    }
}

impl fmt::Display for QualitativeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QualitativeClass {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "POSITIVE" => Ok(Self::Positive),
            "NEUTRAL" => Ok(Self::Neutral),
            "NEGATIVE" => Ok(Self::Negative),
            other => Err(FuzzyError::UnknownClassName(other.to_string())),
        }
    }
}

/// Output fuzzy set class `q`, from LARGEST (1) down to SMALLEST (5).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputClass {
    Largest,
    Large,
    Normal,
    Small,
    Smallest,
}

impl OutputClass {
    pub const ALL: [OutputClass; 5] = [
        Self::Largest,
        Self::Large,
        Self::Normal,
        Self::Small,
        Self::Smallest,
    ];

    /// `q` in 1..=5.
    pub fn from_index(q: u8) -> Result<Self, FuzzyError> {
        match q {
            1..=5 => Ok(Self::ALL[q as usize - 1]),
            other => Err(FuzzyError::UnknownClassIndex(other)),
        }
    }

    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    /// Density constant `rho_q`. The two half-triangles at the ends of the
    /// trust axis get twice the density of the full triangles so every class
    /// carries mass 1/4.
    pub fn density<T: Scalar>(self) -> T {
        match self {
            Self::Largest | Self::Smallest => T::ratio(2, 1),
            Self::Large | Self::Normal | Self::Small => T::one(),
        }
    }

    pub fn membership<T: Scalar>(self) -> TriangularMembership<T> {
        let q = |n| T::ratio(n, 4);
        match self {
            Self::Largest => TriangularMembership::new(q(3), q(4), q(4)),
            Self::Large => TriangularMembership::new(q(2), q(3), q(4)),
            Self::Normal => TriangularMembership::new(q(1), q(2), q(3)),
            Self::Small => TriangularMembership::new(q(0), q(1), q(2)),
            Self::Smallest => TriangularMembership::new(q(0), q(0), q(1)),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("{what} = {value} is outside its domain")]
    DomainViolation { what: &'static str, value: f64 },
    #[error("class index {0} does not exist")]
    UnknownClassIndex(u8),
    #[error("unknown qualitative class `{0}` (expected POSITIVE, NEUTRAL or NEGATIVE)")]
    UnknownClassName(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("no rule declared for qualitative attribute `{0}`")]
    UnknownAttribute(String),
    #[error("rule {rule} cannot serve as the {role} rule")]
    MisplacedRule { rule: RuleKind, role: &'static str },
    #[error("quantitative weights sum to {0}, expected 1")]
    WeightSumViolation(f64),
    #[error("normalizer for `{0}` must be positive")]
    ZeroNormalizer(String),
    #[error("no normalizer for quantitative attribute `{0}`")]
    MissingNormalizer(String),
    #[error("raw value of `{0}` must be finite and non-negative")]
    NegativeRaw(String),
    #[error("aggregated quantitative input {0} exceeds 1; raw value above its normalizer?")]
    AggregateOutOfRange(f64),
    #[error("at least one qualitative assignment is required")]
    EmptyAssignment,
    #[error("link {}->{} (network {}) lacks attribute `{attribute}`", .link.from, .link.to, .link.network)]
    MissingAttribute { link: LinkKey, attribute: String },
}

/// Per-attribute normalizers for links leaving one entity in one network:
/// the largest raw value among that entity's friends there.
pub fn circle_normalizers<T: Scalar>(
    graph: &SocialGraph<T>,
    source: EntityId,
    network: NetworkId,
    rules: &FuzzyRuleSet,
) -> BTreeMap<String, T> {
    let mut max: BTreeMap<String, f64> = BTreeMap::new();
    for link in graph.out_links(source).filter(|l| l.network == network) {
        for name in rules.weights.keys() {
            if let Some(&raw) = link.attributes.quantitative.get(name) {
                let slot = max.entry(name.clone()).or_insert(raw);
                if raw > *slot {
                    *slot = raw;
                }
            }
        }
    }
    max.into_iter()
        .filter_map(|(k, v)| T::from_real(v).map(|v| (k, v)))
        .collect()
}

/// Trust value of a single link from its attribute profile.
pub fn link_trust<T: Scalar>(
    link: &FriendLink<T>,
    normalizers: &BTreeMap<String, T>,
    rules: &FuzzyRuleSet,
) -> Result<T, FuzzyError> {
    let missing = |attribute: &str| FuzzyError::MissingAttribute {
        link: link.key(),
        attribute: attribute.to_string(),
    };
    let mut attributes = Vec::with_capacity(rules.weights.len());
    for (name, &weight) in &rules.weights {
        let raw = *link
            .attributes
            .quantitative
            .get(name)
            .ok_or_else(|| missing(name))?;
        let raw = T::from_real(raw).ok_or_else(|| FuzzyError::NegativeRaw(name.clone()))?;
        let weight = T::from_real(weight).ok_or(FuzzyError::DomainViolation {
            what: "weight",
            value: weight,
        })?;
        attributes.push(QuantitativeAttribute {
            name: name.clone(),
            raw,
            weight,
        });
    }
    let input = aggregate_quantitative(&QuantitativeInput { attributes }, normalizers)?;
    let assignments: Vec<QualitativeAssignment> = link
        .attributes
        .qualitative
        .iter()
        .map(|(name, &class)| QualitativeAssignment {
            attribute: name.clone(),
            class,
        })
        .collect();
    defuzzify(&assignments, rules, input)
}

/// Computes and stores the trust value of every link in the graph.
///
/// Normalizers come from each source's friends in the link's own network.
pub fn compute_link_trust<T: Scalar>(
    graph: &mut SocialGraph<T>,
    rules: &FuzzyRuleSet,
) -> Result<(), Error> {
    let mut normalizer_cache: BTreeMap<(EntityId, NetworkId), BTreeMap<String, T>> =
        BTreeMap::new();
    let mut values = Vec::with_capacity(graph.link_count());
    for link in graph.links() {
        let norms = normalizer_cache
            .entry((link.from, link.network))
            .or_insert_with(|| circle_normalizers(graph, link.from, link.network, rules));
        values.push((link.key(), link_trust(link, norms, rules)?));
    }
    for (key, tv) in values {
        graph.set_trust(key, tv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SocialGraph;

    #[test]
    fn class_indices_round_trip() {
        for c in QualitativeClass::ALL {
            assert_eq!(QualitativeClass::from_index(c.index()), Ok(c));
            assert_eq!(c.as_str().parse::<QualitativeClass>(), Ok(c));
        }
        for c in OutputClass::ALL {
            assert_eq!(OutputClass::from_index(c.index()), Ok(c));
        }
        assert!(QualitativeClass::from_index(4).is_err());
        assert!(OutputClass::from_index(0).is_err());
    }

    fn profile_link(freq: f64, time: f64, major: QualitativeClass, rel: QualitativeClass) -> FriendLink<f64> {
        FriendLink::new(EntityId(1), EntityId(2), NetworkId(1))
            .with_quantitative("freq", freq)
            .with_quantitative("time", time)
            .with_qualitative("major", major)
            .with_qualitative("relationship", rel)
    }

    fn norms(freq: f64, time: f64) -> BTreeMap<String, f64> {
        BTreeMap::from([("freq".to_string(), freq), ("time".to_string(), time)])
    }

    #[test]
    fn relative_with_security_major() {
        let rules = FuzzyRuleSet::major_relationship();
        let link = profile_link(3.0, 3.0, QualitativeClass::Positive, QualitativeClass::Positive);
        let tv = link_trust(&link, &norms(4.0, 4.0), &rules).unwrap();
        assert!((tv - 0.83125).abs() < 1e-12, "{tv}");
    }

    #[test]
    fn all_neutral_profile_is_one_half() {
        let rules = FuzzyRuleSet::major_relationship();
        for freq in [0.5, 1.0, 2.5, 3.9] {
            let link = profile_link(freq, 2.0, QualitativeClass::Neutral, QualitativeClass::Neutral);
            let tv = link_trust(&link, &norms(4.0, 4.0), &rules).unwrap();
            assert!((tv - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_profile_grows_with_input() {
        let rules = FuzzyRuleSet::major_relationship();
        let lo = profile_link(0.0, 0.0, QualitativeClass::Positive, QualitativeClass::Positive);
        let hi = profile_link(4.0, 4.0, QualitativeClass::Positive, QualitativeClass::Positive);
        let n = norms(4.0, 4.0);
        assert!(link_trust(&hi, &n, &rules).unwrap() >= link_trust(&lo, &n, &rules).unwrap());
    }

    #[test]
    fn missing_quantitative_attribute_names_link() {
        let rules = FuzzyRuleSet::major_relationship();
        let link = FriendLink::<f64>::new(EntityId(3), EntityId(4), NetworkId(1))
            .with_quantitative("freq", 1.0)
            .with_qualitative("major", QualitativeClass::Neutral);
        let err = link_trust(&link, &norms(1.0, 1.0), &rules).unwrap_err();
        assert!(err.to_string().contains("3->4"), "{err}");
        assert!(err.to_string().contains("time"));
    }

    #[test]
    fn compute_link_trust_uses_per_source_network_maxima() {
        let mut g = SocialGraph::<f64>::new();
        for i in 1..=3 {
            g.add_entity(EntityId(i), 1.0).unwrap();
        }
        g.add_network(NetworkId(1));
        let pos = QualitativeClass::Positive;
        let mut a = profile_link(3.0, 3.0, pos, pos);
        a.to = EntityId(2);
        let mut b = profile_link(4.0, 4.0, QualitativeClass::Neutral, QualitativeClass::Neutral);
        b.to = EntityId(3);
        g.add_link(a.clone()).unwrap();
        g.add_link(b).unwrap();
        compute_link_trust(&mut g, &FuzzyRuleSet::major_relationship()).unwrap();
        let tv = g.link(a.key()).unwrap().trust_value.unwrap();
        assert!((tv - 0.83125).abs() < 1e-12);
    }
}
