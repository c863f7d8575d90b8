//! Scalar traits the algebra is written against.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A field-like number type: `f32`, `f64` or an exact rational.
pub trait Scalar:
    Num + PartialOrd + Clone + Debug + FromPrimitive + ToPrimitive + std::ops::Neg<Output = Self>
{
    /// Converts a small literal or user-supplied value; panics only if the
    /// value is not representable at all (NaN or infinite for rationals).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `|self| <= tol`.
    fn negligible(&self, tol: &Self) -> bool {
        self.magnitude() <= *tol
    }

    fn powi_exact(&self, k: u32) -> Self {
        num_traits::pow(self.clone(), k as usize)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for BigRational {}

/// Floating-point scalars: iterative solvers, exponentials, least squares.
pub trait Real: Scalar + Float + Send + Sync {}

impl Real for f32 {}
impl Real for f64 {}

/// Builds an exact rational from a ratio of integers.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
