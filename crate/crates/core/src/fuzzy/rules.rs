use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{FuzzyError, OutputClass, QualitativeClass};
use crate::format::{key_values, ParseError};

/// A matched rule: which input class maps to which output class.
///
/// POSITIVE maps to LARGEST (`1i`) or LARGE (`1ii`), NEUTRAL to NORMAL (`2`),
/// NEGATIVE to SMALL (`3i`) or SMALLEST (`3ii`). The `i`/`ii` choice per
/// attribute expresses how strongly that attribute sways trust.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    PositiveLargest,
    PositiveLarge,
    Neutral,
    NegativeSmall,
    NegativeSmallest,
}

impl RuleKind {
    pub const ALL: [RuleKind; 5] = [
        Self::PositiveLargest,
        Self::PositiveLarge,
        Self::Neutral,
        Self::NegativeSmall,
        Self::NegativeSmallest,
    ];

    pub fn input_class(self) -> QualitativeClass {
        match self {
            Self::PositiveLargest | Self::PositiveLarge => QualitativeClass::Positive,
            Self::Neutral => QualitativeClass::Neutral,
            Self::NegativeSmall | Self::NegativeSmallest => QualitativeClass::Negative,
        }
    }

    pub fn output_class(self) -> OutputClass {
        match self {
            Self::PositiveLargest => OutputClass::Largest,
            Self::PositiveLarge => OutputClass::Large,
            Self::Neutral => OutputClass::Normal,
            Self::NegativeSmall => OutputClass::Small,
            Self::NegativeSmallest => OutputClass::Smallest,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PositiveLargest => "1i",
            Self::PositiveLarge => "1ii",
            Self::Neutral => "2",
            Self::NegativeSmall => "3i",
            Self::NegativeSmallest => "3ii",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RuleKind {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.label() == s)
            .ok_or_else(|| FuzzyError::UnknownRule(s.to_string()))
    }
}

/// Rule choice for one qualitative attribute.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AttributeRule {
    positive: RuleKind,
    negative: RuleKind,
}

impl AttributeRule {
    pub fn new(positive: RuleKind, negative: RuleKind) -> Result<Self, FuzzyError> {
        if positive.input_class() != QualitativeClass::Positive {
            return Err(FuzzyError::MisplacedRule {
                rule: positive,
                role: "positive",
            });
        }
        if negative.input_class() != QualitativeClass::Negative {
            return Err(FuzzyError::MisplacedRule {
                rule: negative,
                role: "negative",
            });
        }
        Ok(AttributeRule { positive, negative })
    }

    /// Attribute with a strong pull on trust: `1i` / `3ii`.
    pub fn strong() -> Self {
        AttributeRule {
            positive: RuleKind::PositiveLargest,
            negative: RuleKind::NegativeSmallest,
        }
    }

    /// Attribute with a moderate pull on trust: `1ii` / `3i`.
    pub fn moderate() -> Self {
        AttributeRule {
            positive: RuleKind::PositiveLarge,
            negative: RuleKind::NegativeSmall,
        }
    }

    pub fn positive(&self) -> RuleKind {
        self.positive
    }

    pub fn negative(&self) -> RuleKind {
        self.negative
    }

    pub fn rule_for(&self, class: QualitativeClass) -> RuleKind {
        match class {
            QualitativeClass::Positive => self.positive,
            QualitativeClass::Neutral => RuleKind::Neutral,
            QualitativeClass::Negative => self.negative,
        }
    }
}

/// Rule table and quantitative weights, loaded from a rule-set file.
///
/// ```text
/// # qualitative attributes
/// attribute relationship positive_rule=1i negative_rule=3ii
/// attribute major positive_rule=1ii negative_rule=3i
/// # quantitative attributes with their weights (must sum to 1)
/// quantitative freq weight=0.5
/// quantitative time weight=0.5
/// ```
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FuzzyRuleSet {
    pub attributes: BTreeMap<String, AttributeRule>,
    pub weights: BTreeMap<String, f64>,
}

impl FuzzyRuleSet {
    /// Two qualitative attributes (`major` moderate, `relationship` strong)
    /// and two equally weighted quantitative ones (`freq`, `time`).
    pub fn major_relationship() -> Self {
        FuzzyRuleSet {
            attributes: BTreeMap::from([
                ("major".to_string(), AttributeRule::moderate()),
                ("relationship".to_string(), AttributeRule::strong()),
            ]),
            weights: BTreeMap::from([("freq".to_string(), 0.5), ("time".to_string(), 0.5)]),
        }
    }

    pub fn rule(&self, attribute: &str, class: QualitativeClass) -> Result<RuleKind, FuzzyError> {
        self.attributes
            .get(attribute)
            .map(|r| r.rule_for(class))
            .ok_or_else(|| FuzzyError::UnknownAttribute(attribute.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut set = FuzzyRuleSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ParseError::new(line_no, msg);
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let name = words
                .next()
                .ok_or_else(|| err(format!("`{kind}` needs an attribute name")))?
                .to_string();
            let kv = key_values(words).map_err(&err)?;
            match kind {
                "attribute" => {
                    let get = |key: &str| -> Result<RuleKind, ParseError> {
                        let v = kv.get(key).ok_or_else(|| err(format!("missing `{key}`")))?;
                        v.parse().map_err(|e: FuzzyError| err(e.to_string()))
                    };
                    for key in kv.keys() {
                        if key != "positive_rule" && key != "negative_rule" {
                            return Err(err(format!("unknown key `{key}`")));
                        }
                    }
                    let rule = AttributeRule::new(get("positive_rule")?, get("negative_rule")?)
                        .map_err(|e| err(e.to_string()))?;
                    if set.attributes.insert(name.clone(), rule).is_some() {
                        return Err(err(format!("attribute `{name}` declared twice")));
                    }
                }
                "quantitative" => {
                    for key in kv.keys() {
                        if key != "weight" {
                            return Err(err(format!("unknown key `{key}`")));
                        }
                    }
                    let w = kv
                        .get("weight")
                        .ok_or_else(|| err("missing `weight`".to_string()))?;
                    let w: f64 = w
                        .parse()
                        .map_err(|_| err(format!("invalid weight `{w}`")))?;
                    if !(0.0..=1.0).contains(&w) {
                        return Err(err(format!("weight {w} outside [0, 1]")));
                    }
                    if set.weights.insert(name.clone(), w).is_some() {
                        return Err(err(format!("quantitative `{name}` declared twice")));
                    }
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        if set.attributes.is_empty() {
            return Err(ParseError::new(0, "rule set declares no qualitative attribute"));
        }
        let total: f64 = set.weights.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ParseError::new(
                0,
                format!("quantitative weights sum to {total}, expected 1"),
            ));
        }
        Ok(set)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, rule) in &self.attributes {
            out.push_str(&format!(
                "attribute {name} positive_rule={} negative_rule={}\n",
                rule.positive, rule.negative
            ));
        }
        for (name, w) in &self.weights {
            out.push_str(&format!("quantitative {name} weight={w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_labels_round_trip() {
        for r in RuleKind::ALL {
            assert_eq!(r.label().parse::<RuleKind>(), Ok(r));
        }
        assert!("4".parse::<RuleKind>().is_err());
    }

    #[test]
    fn misplaced_rules_rejected() {
        assert!(AttributeRule::new(RuleKind::NegativeSmall, RuleKind::NegativeSmall).is_err());
        assert!(AttributeRule::new(RuleKind::PositiveLarge, RuleKind::Neutral).is_err());
    }

    #[test]
    fn parses_and_serialises() {
        let text = "\
# two attributes
attribute relationship positive_rule=1i negative_rule=3ii
attribute major positive_rule=1ii negative_rule=3i
quantitative freq weight=0.5
quantitative time weight=0.5
";
        let set = FuzzyRuleSet::parse(text).unwrap();
        assert_eq!(set, FuzzyRuleSet::major_relationship());
        assert_eq!(FuzzyRuleSet::parse(&set.to_text()).unwrap(), set);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = FuzzyRuleSet::parse("attribute major positive_rule=2 negative_rule=3i\n").unwrap_err();
        assert_eq!(err.line, 1);
        let err = FuzzyRuleSet::parse("\n\nfoo bar\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = FuzzyRuleSet::parse(
            "attribute major positive_rule=1i negative_rule=3i\nquantitative f weight=0.4\n",
        )
        .unwrap_err();
        assert!(err.message.contains("sum"));
    }

    #[test]
    fn shipped_attribute_catalog_parses() {
        let text = include_str!("../../../../data/attribute_catalog.rules");
        let set = FuzzyRuleSet::parse(text).unwrap();
        assert_eq!(set.attributes.len(), 10);
        assert_eq!(set.attributes["relationship"], AttributeRule::strong());
    }
}
