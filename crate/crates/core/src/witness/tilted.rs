//! Closed-form bounds of the tilted S3 family and the certification rule.

use serde::{Deserialize, Serialize};

use super::check_t;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedBounds<T: Scalar> {
    pub classical: T,
    pub stab: T,
    pub two_stab: T,
    pub quantum: T,
}

/// C = max(4 − 2t, 6t), STAB = max(6t, 4 − 2t, 2t√5 + 2(1 − t)√2),
/// 2-STAB = max(6t, 4 − 2t, 2t + 2√2), Q = 2t + 4√(t² + (1 − t)²).
pub fn tilted_bounds<T: Scalar>(t: T) -> Result<TiltedBounds<T>> {
    check_t(t)?;
    let two = T::lit(2.0);
    let (sqrt2, sqrt5) = (two.sqrt(), T::lit(5.0).sqrt());
    let s = T::one() - t;
    let low = (T::lit(4.0) - two * t).max(T::lit(6.0) * t);
    Ok(TiltedBounds {
        classical: low,
        stab: low.max(two * t * sqrt5 + two * s * sqrt2),
        two_stab: low.max(two * t + two * sqrt2),
        quantum: two * t + T::lit(4.0) * (t * t + s * s).sqrt(),
    })
}

/// Where the stabilizer bound switches branch: t₀ = (√2 − 2)/(√2 − √5 − 1)
/// from 4 − 2t to the mixed branch, t₁ = √2/(3 + √2 − √5) from it to 6t.
pub fn stab_breakpoints<T: Scalar>() -> (T, T) {
    let (sqrt2, sqrt5) = (T::lit(2.0).sqrt(), T::lit(5.0).sqrt());
    (
        (sqrt2 - T::lit(2.0)) / (sqrt2 - sqrt5 - T::one()),
        sqrt2 / (T::lit(3.0) + sqrt2 - sqrt5),
    )
}

/// Branch changes of the 2-stabilizer bound: 1 − 1/√2 and 1/√2.
pub fn two_stab_breakpoints<T: Scalar>() -> (T, T) {
    let inv = T::one() / T::lit(2.0).sqrt();
    (T::one() - inv, inv)
}

/// What a witness value proves about the preparations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certification {
    /// Explainable with stabilizer states only.
    None,
    /// At least one preparation is non-stabilizer.
    AtLeastOneNs,
    /// At least two preparations are non-stabilizer.
    AtLeastTwoNs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationBounds<T: Scalar> {
    pub stab: T,
    pub two_stab: Option<T>,
}

impl<T: Scalar> CertificationBounds<T> {
    /// For S3 the 2-stabilizer bound already equals the quantum bound.
    pub fn s3() -> Self {
        Self {
            stab: T::lit(5.0).sqrt() + T::lit(2.0).sqrt(),
            two_stab: Some(T::one() + T::lit(2.0) * T::lit(2.0).sqrt()),
        }
    }

    pub fn tilted(t: T) -> Result<Self> {
        let b = tilted_bounds(t)?;
        Ok(Self { stab: b.stab, two_stab: Some(b.two_stab) })
    }
}

pub fn certify<T: Scalar>(value: T, bounds: &CertificationBounds<T>) -> Result<Certification> {
    if let Some(two) = bounds.two_stab {
        if two < bounds.stab {
            return Err(Error::BoundOrdering(format!("2-STAB {two} below STAB {}", bounds.stab)));
        }
    }
    Ok(if value <= bounds.stab {
        Certification::None
    } else if bounds.two_stab.is_none_or(|two| value <= two) {
        Certification::AtLeastOneNs
    } else {
        Certification::AtLeastTwoNs
    })
}
