//! Qubit Bloch vectors.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Slack on ‖r‖ ≤ 1 absorbed by renormalization rather than rejected.
pub const NORM_SLACK: f64 = 1e-9;

/// A real 3-vector of norm at most one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T: Scalar>(Vector3<T>);

impl<T: Scalar> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    /// Accepts ‖v‖ ≤ 1 + 1e-9, rescaling onto the sphere when it overshoots.
    pub fn from_vector(v: Vector3<T>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() {
            return Err(Error::BlochNorm(n.as_f64()));
        }
        if n <= T::one() {
            Ok(Self(v))
        } else if n <= T::one() + T::lit(NORM_SLACK) {
            Ok(Self(v / n))
        } else {
            Err(Error::BlochNorm(n.as_f64()))
        }
    }

    /// The direction of `v`, or `None` for the zero vector.
    pub fn unit(v: Vector3<T>) -> Option<Self> {
        let n = v.norm();
        (n > T::zero()).then(|| Self(v / n))
    }

    pub(crate) fn from_array_unchecked(v: [T; 3]) -> Self {
        Self(Vector3::new(v[0], v[1], v[2]))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    /// The six octahedron vertices in the order +x, −x, +y, −y, +z, −z.
    pub fn vertices() -> [Self; 6] {
        std::array::from_fn(|k| {
            let mut v = Vector3::zeros();
            v[k / 2] = if k % 2 == 0 { T::one() } else { -T::one() };
            Self(v)
        })
    }

    #[inline]
    pub fn vector(&self) -> &Vector3<T> {
        &self.0
    }

    #[inline]
    pub fn components(&self) -> [T; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.0.norm()
    }

    #[inline]
    pub fn l1_norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, x| acc + x.abs())
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.components().map(Scalar::as_f64)
    }
}

impl<T: Scalar> std::ops::Neg for BlochVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes_small_overshoot_only() {
        let v = BlochVector::new(1.0 + 5e-10, 0.0, 0.0).unwrap();
        assert_eq!(v.norm(), 1.0);
        assert!(BlochVector::new(1.0 + 1e-6, 0.0, 0.0).is_err());
        assert!(BlochVector::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn vertex_order() {
        let v = BlochVector::<f64>::vertices();
        assert_eq!(v[0].components(), [1.0, 0.0, 0.0]);
        assert_eq!(v[3].components(), [0.0, -1.0, 0.0]);
        assert_eq!(v[5].components(), [0.0, 0.0, -1.0]);
    }
}
