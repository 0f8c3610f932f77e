//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt;

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// The tolerances are attached to the type so that structural checks stay
/// meaningful at single precision.
pub trait Scalar:
    RealField + Copy + FloatConst + FromPrimitive + ToPrimitive + fmt::Display + fmt::LowerExp
{
    /// Tolerance for algebraic identities (unitarity, group law, trace).
    const ALGEBRAIC_TOL: f64;
    /// Tolerance for structural checks (Hermiticity, positivity, projector).
    const STRUCTURAL_TOL: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Scalar for f64 {
    const ALGEBRAIC_TOL: f64 = 1e-12;
    const STRUCTURAL_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const ALGEBRAIC_TOL: f64 = 2e-5;
    const STRUCTURAL_TOL: f64 = 1e-4;
}
