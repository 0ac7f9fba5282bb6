//! Floating-point scalar abstraction shared by the exact engine and the
//! asymptotic evaluators.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the library is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant; every `f64` is representable up to rounding.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant fits the scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("integer fits the scalar type")
    }

    /// Converts a signed lattice coordinate.
    #[inline]
    fn of_i64(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for "exact up to roundoff" checks: `floor`, widened to a
    /// small multiple of the machine epsilon for narrow types.
    #[inline]
    fn roundoff_tol(floor: f64) -> Self {
        let eps = Self::epsilon() * Self::c(64.0);
        Self::c(floor).max(eps)
    }
}

impl Real for f32 {}
impl Real for f64 {}
