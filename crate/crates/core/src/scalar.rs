//! Numeric abstraction shared by the mechanics and the solver.
//!
//! Expected payoffs under risk-neutral utility are ratios of small integers, so
//! the solver can run over exact rationals and decide ties without tolerance.
//! Curved utilities need `exp`/`powf` and are restricted to [`RealScalar`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    /// Largest relative difference still treated as a tie when comparing payoffs.
    fn tie_tolerance() -> Self;

    fn from_count(v: u32) -> Self {
        Self::from_u32(v).expect("u32 fits every scalar type")
    }

    fn abs_value(self) -> Self {
        if self < Self::zero() {
            Self::zero() - self
        } else {
            self
        }
    }

    fn approx_eq(self, other: Self) -> bool {
        let d = (self - other).abs_value();
        let (a, b) = (self.abs_value(), other.abs_value());
        let scale = if a > b { a } else { b };
        d == Self::zero() || d <= Self::tie_tolerance() * scale
    }

    /// `self` exceeds `other` by more than the tie tolerance.
    fn clearly_greater(self, other: Self) -> bool {
        self > other && !self.approx_eq(other)
    }
}

/// Floating-point scalars.
pub trait RealScalar: Scalar + Float {}

impl Scalar for f64 {
    fn tie_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tie_tolerance() -> Self {
        1e-5
    }
}

impl RealScalar for f64 {}
impl RealScalar for f32 {}

impl Scalar for Ratio<i64> {
    fn tie_tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for Ratio<i128> {
    fn tie_tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ties_are_exact() {
        let a = Ratio::new(1i64, 3);
        let b = Ratio::new(2i64, 6);
        assert!(a.approx_eq(b));
        assert!(!a.approx_eq(Ratio::new(333_333_333i64, 1_000_000_000)));
    }

    #[test]
    fn float_ties_use_tolerance() {
        assert!(80.0f64.approx_eq(80.0 + 1e-11));
        assert!(!80.0f64.approx_eq(80.0 + 1e-6));
        assert!(!1e-17f64.approx_eq(2e-17));
        assert!(0.0f64.approx_eq(0.0));
    }
}
