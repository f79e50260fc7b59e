use std::collections::BTreeMap;

use super::{FuzzyError, FuzzyRuleSet, QualitativeClass, RuleKind};
use crate::scalar::{tolerance, Scalar};

/// Moment `position` (integral of `t * rho * mu`) and `mass` (integral of
/// `rho * mu`) of one output shape truncated at the grade a rule fires with.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TruncatedMass<T> {
    pub position: T,
    pub mass: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualitativeAssignment {
    pub attribute: String,
    pub class: QualitativeClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantitativeAttribute<T> {
    pub name: String,
    pub raw: T,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct QuantitativeInput<T> {
    pub attributes: Vec<QuantitativeAttribute<T>>,
}

/// Weighted sum of normalised raw values, the crisp input `E`.
pub fn aggregate_quantitative<T: Scalar>(
    input: &QuantitativeInput<T>,
    normalizers: &BTreeMap<String, T>,
) -> Result<T, FuzzyError> {
    let tol = tolerance::<T>();
    let mut weight_sum = T::zero();
    let mut e = T::zero();
    for attr in &input.attributes {
        if attr.weight < T::zero() || attr.weight > T::one() {
            return Err(FuzzyError::DomainViolation {
                what: "weight",
                value: attr.weight.as_f64(),
            });
        }
        if attr.raw < T::zero() {
            return Err(FuzzyError::NegativeRaw(attr.name.clone()));
        }
        let norm = *normalizers
            .get(&attr.name)
            .ok_or_else(|| FuzzyError::MissingNormalizer(attr.name.clone()))?;
        weight_sum = weight_sum + attr.weight;
        if norm.is_zero() && attr.raw.is_zero() {
            continue;
        }
        if norm <= T::zero() {
            return Err(FuzzyError::ZeroNormalizer(attr.name.clone()));
        }
        e = e + attr.weight * attr.raw / norm;
    }
    let off = if weight_sum > T::one() { weight_sum - T::one() } else { T::one() - weight_sum };
    if off > tol {
        return Err(FuzzyError::WeightSumViolation(weight_sum.as_f64()));
    }
    if e > T::one() + tol {
        return Err(FuzzyError::AggregateOutOfRange(e.as_f64()));
    }
    Ok(T::min_of(e, T::one()))
}

fn check_input<T: Scalar>(e: T) -> Result<(), FuzzyError> {
    if e.in_unit_interval() {
        Ok(())
    } else {
        Err(FuzzyError::DomainViolation {
            what: "E",
            value: e.as_f64(),
        })
    }
}

/// Closed-form moments of the output shape of `rule` truncated at the grade
/// its input membership assigns to `e`.
pub fn truncated_mass<T: Scalar>(rule: RuleKind, e: T) -> Result<TruncatedMass<T>, FuzzyError> {
    check_input(e)?;
    let r = |n, d| T::ratio(n, d);
    let one = T::one();
    let e2 = e * e;
    let e3 = e2 * e;
    // Grade is `e` for the positive rules and `1 - e` for the negative ones,
    // so the masses share the two forms below.
    let rising = (r(2, 1) * e - e2) / r(4, 1);
    let falling = (one - e2) / r(4, 1);
    let (position, mass) = match rule {
        RuleKind::PositiveLargest => ((r(21, 1) * e - r(9, 1) * e2 - e3) / r(48, 1), rising),
        RuleKind::PositiveLarge => (r(3, 4) * rising, rising),
        RuleKind::Neutral if e <= r(1, 2) => (rising / r(2, 1), rising),
        RuleKind::Neutral => (falling / r(2, 1), falling),
        RuleKind::NegativeSmall => (falling / r(4, 1), falling),
        RuleKind::NegativeSmallest => ((one - e3) / r(48, 1), falling),
    };
    Ok(TruncatedMass { position, mass })
}

/// Derivatives in `e` of both moments. Used where every shape has vanished
/// and the centre of mass is taken as the limit of the ratio.
pub fn mass_derivatives<T: Scalar>(rule: RuleKind, e: T) -> Result<TruncatedMass<T>, FuzzyError> {
    check_input(e)?;
    let r = |n, d| T::ratio(n, d);
    let e2 = e * e;
    let rising = (r(2, 1) - r(2, 1) * e) / r(4, 1);
    let falling = T::zero() - r(2, 1) * e / r(4, 1);
    let (position, mass) = match rule {
        RuleKind::PositiveLargest => ((r(21, 1) - r(18, 1) * e - r(3, 1) * e2) / r(48, 1), rising),
        RuleKind::PositiveLarge => (r(3, 4) * rising, rising),
        RuleKind::Neutral if e <= r(1, 2) => (rising / r(2, 1), rising),
        RuleKind::Neutral => (falling / r(2, 1), falling),
        RuleKind::NegativeSmall => (falling / r(4, 1), falling),
        RuleKind::NegativeSmallest => (T::zero() - r(3, 1) * e2 / r(48, 1), falling),
    };
    Ok(TruncatedMass { position, mass })
}

/// Centre of mass of the matched rules' truncated outputs at input `e`.
pub fn defuzzify_rules<T: Scalar>(rules: &[RuleKind], e: T) -> Result<T, FuzzyError> {
    if rules.is_empty() {
        return Err(FuzzyError::EmptyAssignment);
    }
    let mut position = T::zero();
    let mut mass = T::zero();
    for &rule in rules {
        let m = truncated_mass(rule, e)?;
        position = position + m.position;
        mass = mass + m.mass;
    }
    if mass.is_zero() {
        position = T::zero();
        mass = T::zero();
        for &rule in rules {
            let d = mass_derivatives(rule, e)?;
            position = position + d.position;
            mass = mass + d.mass;
        }
    }
    let tv = position / mass;
    Ok(T::max_of(T::zero(), T::min_of(tv, T::one())))
}

/// Trust value for a set of qualitative assignments under `rules`.
pub fn defuzzify<T: Scalar>(
    assignments: &[QualitativeAssignment],
    rules: &FuzzyRuleSet,
    e: T,
) -> Result<T, FuzzyError> {
    let matched = assignments
        .iter()
        .map(|a| rules.rule(&a.attribute, a.class))
        .collect::<Result<Vec<_>, _>>()?;
    defuzzify_rules(&matched, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::eval_input_membership;
    use crate::Rational;
    use proptest::prelude::*;

    /// Moments by composite Simpson integration of `rho * min(grade, mu(t))`.
    fn quadrature(rule: RuleKind, e: f64) -> (f64, f64) {
        let out = rule.output_class();
        let tri = out.membership::<f64>();
        let rho: f64 = out.density();
        let grade = eval_input_membership(rule.input_class(), e).unwrap();
        let f = |t: f64| rho * grade.min(tri.grade(t));
        // Integrate each linear piece separately so Simpson is exact on it.
        let mut knots = vec![tri.left, tri.peak, tri.right];
        if grade > 0.0 && grade < 1.0 {
            knots.push(tri.left + grade * (tri.peak - tri.left));
            knots.push(tri.right - grade * (tri.right - tri.peak));
        }
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup();
        let (mut pos, mut mass) = (0.0, 0.0);
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = 64;
            let h = (b - a) / n as f64;
            for k in 0..=n {
                let t = a + k as f64 * h;
                let c = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                pos += c * t * f(t) * h / 3.0;
                mass += c * f(t) * h / 3.0;
            }
        }
        (pos, mass)
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for rule in RuleKind::ALL {
            for k in 0..=100 {
                let e = k as f64 / 100.0;
                let m = truncated_mass(rule, e).unwrap();
                let (p, q) = quadrature(rule, e);
                assert!((m.position - p).abs() < 1e-12, "{rule} e={e}: {} vs {p}", m.position);
                assert!((m.mass - q).abs() < 1e-12, "{rule} e={e}: {} vs {q}", m.mass);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for rule in RuleKind::ALL {
            for k in 1..20 {
                let e = k as f64 / 20.0 + 0.013;
                let lo = truncated_mass(rule, e - h).unwrap();
                let hi = truncated_mass(rule, e + h).unwrap();
                let d = mass_derivatives(rule, e).unwrap();
                assert!(((hi.position - lo.position) / (2.0 * h) - d.position).abs() < 1e-7);
                assert!(((hi.mass - lo.mass) / (2.0 * h) - d.mass).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn two_positive_attributes_exact() {
        use RuleKind::*;
        let e = Rational::new(3, 4);
        let tv = defuzzify_rules(&[PositiveLarge, PositiveLargest], e).unwrap();
        assert_eq!(tv, Rational::new(133, 160));
        let tv: f64 = defuzzify_rules(&[PositiveLarge, PositiveLargest], 0.75).unwrap();
        assert!((tv - 0.83125).abs() < 1e-12);
    }

    #[test]
    fn neutral_and_stranger_profile() {
        use RuleKind::*;
        // (7/128 + 37/3072) / (7/64 + 7/64)
        let tv = defuzzify_rules(&[Neutral, NegativeSmallest], Rational::new(3, 4)).unwrap();
        assert_eq!(tv, Rational::new(205, 672));
        let f: f64 = defuzzify_rules(&[Neutral, NegativeSmallest], 0.75).unwrap();
        assert!((f - 0.305_06).abs() < 1e-5, "{f}");
    }

    #[test]
    fn vanished_mass_uses_limit() {
        use RuleKind::*;
        let tv: f64 = defuzzify_rules(&[PositiveLargest], 0.0).unwrap();
        assert!((tv - 0.875).abs() < 1e-12);
        let near: f64 = defuzzify_rules(&[PositiveLargest], 1e-9).unwrap();
        assert!((tv - near).abs() < 1e-6);
        let tv: f64 = defuzzify_rules(&[NegativeSmallest], 1.0).unwrap();
        assert!((tv - 0.125).abs() < 1e-12);
        let tv: f64 = defuzzify_rules(&[Neutral, NegativeSmall], 1.0).unwrap();
        let near: f64 = defuzzify_rules(&[Neutral, NegativeSmall], 1.0 - 1e-9).unwrap();
        assert!((tv - near).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(defuzzify_rules::<f64>(&[], 0.5).is_err());
        assert!(defuzzify_rules(&[RuleKind::Neutral], 1.01).is_err());
        assert!(defuzzify_rules(&[RuleKind::Neutral], f64::NAN).is_err());
        let rules = FuzzyRuleSet::major_relationship();
        let a = [QualitativeAssignment {
            attribute: "religion".into(),
            class: QualitativeClass::Positive,
        }];
        assert_eq!(
            defuzzify(&a, &rules, 0.5),
            Err(FuzzyError::UnknownAttribute("religion".into()))
        );
    }

    #[test]
    fn aggregate_checks() {
        let attr = |name: &str, raw: f64, weight: f64| QuantitativeAttribute {
            name: name.into(),
            raw,
            weight,
        };
        let norms = BTreeMap::from([("a".to_string(), 4.0), ("b".to_string(), 2.0)]);
        let input = QuantitativeInput {
            attributes: vec![attr("a", 3.0, 0.5), attr("b", 1.0, 0.5)],
        };
        assert!((aggregate_quantitative(&input, &norms).unwrap() - 0.625).abs() < 1e-15);
        let input = QuantitativeInput {
            attributes: vec![attr("a", 3.0, 0.5), attr("b", 1.0, 0.4)],
        };
        assert!(matches!(
            aggregate_quantitative(&input, &norms),
            Err(FuzzyError::WeightSumViolation(_))
        ));
        let input = QuantitativeInput {
            attributes: vec![attr("a", 5.0, 1.0)],
        };
        assert!(matches!(
            aggregate_quantitative(&input, &norms),
            Err(FuzzyError::AggregateOutOfRange(_))
        ));
        let input = QuantitativeInput {
            attributes: vec![attr("c", 1.0, 1.0)],
        };
        assert!(matches!(
            aggregate_quantitative(&input, &norms),
            Err(FuzzyError::MissingNormalizer(_))
        ));
    }

    fn any_rule() -> impl Strategy<Value = RuleKind> {
        (0usize..5).prop_map(|i| RuleKind::ALL[i])
    }

    proptest! {
        #[test]
        fn trust_stays_in_unit_interval(rules in prop::collection::vec(any_rule(), 1..6), e in 0.0f64..=1.0) {
            let tv = defuzzify_rules(&rules, e).unwrap();
            prop_assert!((0.0..=1.0).contains(&tv));
        }

        #[test]
        fn positive_rules_never_decrease(
            strong in 0usize..4, moderate in 0usize..4, a in 0.0f64..=1.0, b in 0.0f64..=1.0,
        ) {
            prop_assume!(strong + moderate > 0);
            let mut rules = vec![RuleKind::PositiveLargest; strong];
            rules.extend(std::iter::repeat_n(RuleKind::PositiveLarge, moderate));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let tlo = defuzzify_rules(&rules, lo).unwrap();
            let thi = defuzzify_rules(&rules, hi).unwrap();
            prop_assert!(thi >= tlo - 1e-12, "{tlo} > {thi}");
        }

        #[test]
        fn rational_and_float_agree(rules in prop::collection::vec(any_rule(), 1..5), k in 0i128..=64) {
            let exact = defuzzify_rules(&rules, Rational::new(k, 64)).unwrap();
            let float = defuzzify_rules(&rules, k as f64 / 64.0).unwrap();
            prop_assert!((exact.as_f64() - float).abs() < 1e-12);
        }
    }
}
