//! Scalar abstraction shared by the geometry, contact, energy and solver code.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Real scalar the bearing model is evaluated in.
///
/// Implemented for `f32`, `f64` and any other type providing the num-traits
/// float surface (double-double types are used by the test oracles).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter.
    ///
    /// Goes through `NumCast`: some double-double types only implement the
    /// integer hooks of `FromPrimitive`, whose default `from_f64` truncates.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal not representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("count not representable")
    }

    /// Lossy conversion back to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Default + Send + Sync + 'static
{
}

/// `x^{3/2}` for non-negative `x`.
#[inline]
pub(crate) fn pow3_2<T: Real>(x: T) -> T {
    x * x.sqrt()
}

/// `x^{5/2}` for non-negative `x`.
#[inline]
pub(crate) fn pow5_2<T: Real>(x: T) -> T {
    x * x * x.sqrt()
}
