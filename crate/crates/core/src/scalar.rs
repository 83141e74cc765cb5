//! Floating-point abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the library computes with: `f32` or `f64`.
///
/// Random draws are always produced in `f64` and converted, so the sampled
/// stream for a given seed is the same regardless of `Self`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Largest deviation of a probability sum from 1 that is silently
    /// renormalized on construction.
    const RENORM_TOLERANCE: f64;
    /// Smallest absolute quadrature tolerance worth asking for.
    const MIN_TOLERANCE: f64;

    /// Converts an `f64` literal; panics only for values outside the range of `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f64 {
    const RENORM_TOLERANCE: f64 = 1e-9;
    const MIN_TOLERANCE: f64 = 1e-14;
}

impl Real for f32 {
    const RENORM_TOLERANCE: f64 = 1e-5;
    const MIN_TOLERANCE: f64 = 1e-6;
}

/// `x · ln x` with the limit value 0 at `x = 0`.
#[inline]
pub(crate) fn xlnx<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.ln()
    }
}

/// `−Σ p ln p`; returns `+0` for degenerate distributions.
#[inline]
pub(crate) fn entropy_nats<T: Real>(probs: &[T]) -> T {
    T::zero() - probs.iter().map(|&p| xlnx(p)).sum::<T>()
}
