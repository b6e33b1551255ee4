//! Scalar traits shared by the exact and the floating-point layers.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FloatConst, FromPrimitive, Num, Signed};

/// A field with exact arithmetic.
///
/// Everything in the chain-complex layer is generic over this trait. The
/// blanket implementation covers `Ratio<I>` for any signed integer type, so
/// `Ratio<BigInt>` (the default, see [`crate::Rat`]) as well as the
/// fixed-width `Ratio<i64>` / `Ratio<i128>` work.
pub trait ExactField: Clone + PartialEq + Debug + Display + Num + Signed + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;

    fn from_frac(numer: i64, denom: i64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    /// Numerator and denominator as decimal strings, denominator positive.
    fn parts(&self) -> (String, String);
}

impl<I> ExactField for Ratio<I>
where
    I: Clone + Integer + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("integer does not fit the scalar type"))
    }

    fn parts(&self) -> (String, String) {
        // Ratio keeps the denominator positive and the pair reduced.
        (self.numer().to_string(), self.denom().to_string())
    }
}

/// Floating point scalar used by the numerical local model.
pub trait Real: num_traits::Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("float literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}
