//! Numeric abstraction shared by the fuzzy engine, the graph's trust values
//! and trust propagation.
//!
//! Everything that is pure arithmetic over trust values (membership grades,
//! truncated masses, path products) is written against [`Scalar`], so it runs
//! unchanged on `f32`, `f64` and exact rationals such as
//! [`Rational`](crate::Rational). Sampling code is `f64` only.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A field-like number type usable for trust arithmetic.
///
/// Blanket-implemented; any `Copy` numeric type with conversions qualifies.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Builds `num / den` in this type.
    ///
    /// Panics if either integer is not representable, which cannot happen for
    /// the small literals used in this crate.
    fn ratio(num: i64, den: i64) -> Self {
        let n = Self::from_i64(num).expect("numerator representable");
        let d = Self::from_i64(den).expect("denominator representable");
        n / d
    }

    /// Lossy conversion used at the boundary to sampling code and output.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion from parsed or generated floating-point data.
    fn from_real(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        Self::from_f64(x)
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// True when `self` lies in the closed unit interval.
    fn in_unit_interval(self) -> bool {
        self >= Self::zero() && self <= Self::one()
    }
}

impl<T> Scalar for T where
    T: Num + Copy + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Absolute tolerance used for unit-interval and weight-sum checks.
pub(crate) fn tolerance<T: Scalar>() -> T {
    T::ratio(1, 1_000_000_000_000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn ratio_literals_are_exact_for_rationals() {
        let q: Rational = Scalar::ratio(3, 4);
        assert_eq!(q, Rational::new(3, 4));
        assert_eq!(<f64 as Scalar>::ratio(3, 4), 0.75);
    }

    #[test]
    fn min_max_helpers() {
        assert_eq!(0.3f64.min_of(0.2), 0.2);
        assert_eq!(0.3f32.max_of(0.7), 0.7);
        assert!(Rational::new(1, 2).in_unit_interval());
        assert!(!Rational::new(3, 2).in_unit_interval());
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(<f64 as Scalar>::from_real(f64::NAN).is_none());
        assert_eq!(<f64 as Scalar>::from_real(0.5), Some(0.5));
    }
}
