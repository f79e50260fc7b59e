use super::{FuzzyError, OutputClass, QualitativeClass};
use crate::scalar::Scalar;

/// Unit-height triangle on `[left, right]` peaking at `peak`.
///
/// `peak` may coincide with an end point, giving a right triangle (used for
/// the two extreme output classes).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TriangularMembership<T> {
    pub left: T,
    pub peak: T,
    pub right: T,
}

impl<T: Scalar> TriangularMembership<T> {
    pub fn new(left: T, peak: T, right: T) -> Self {
        debug_assert!(left <= peak && peak <= right && left < right);
        TriangularMembership { left, peak, right }
    }

    pub fn grade(&self, x: T) -> T {
        if x < self.left || x > self.right {
            T::zero()
        } else if x < self.peak {
            (x - self.left) / (self.peak - self.left)
        } else if x > self.peak {
            (self.right - x) / (self.right - self.peak)
        } else {
            T::one()
        }
    }

    /// Area under the triangle.
    pub fn area(&self) -> T {
        (self.right - self.left) / T::ratio(2, 1)
    }
}

fn check_unit<T: Scalar>(what: &'static str, x: T) -> Result<(), FuzzyError> {
    if x.in_unit_interval() {
        Ok(())
    } else {
        Err(FuzzyError::DomainViolation {
            what,
            value: x.as_f64(),
        })
    }
}

/// Grade of the crisp input `e` in the membership selected by `class`:
/// rising for POSITIVE, a tent peaking at 1/2 for NEUTRAL, falling for
/// NEGATIVE.
pub fn eval_input_membership<T: Scalar>(class: QualitativeClass, e: T) -> Result<T, FuzzyError> {
    check_unit("E", e)?;
    let half = T::ratio(1, 2);
    Ok(match class {
        QualitativeClass::Positive => e,
        QualitativeClass::Neutral if e <= half => e,
        QualitativeClass::Neutral => T::one() - e,
        QualitativeClass::Negative => T::one() - e,
    })
}

pub fn eval_output_membership<T: Scalar>(class: OutputClass, tv: T) -> Result<T, FuzzyError> {
    check_unit("tv", tv)?;
    Ok(class.membership().grade(tv))
}
