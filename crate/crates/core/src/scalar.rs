//! Real scalar abstraction: `f32` or `f64` via `num-traits`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the whole crate is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, saturating underflow to zero.
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::zero)
    }

    /// A stated tolerance, floored at 32 machine epsilons so validation
    /// thresholds stay meaningful at lower working precision.
    fn tol(stated: f64) -> Self {
        Self::of(stated).max(Self::epsilon() * Self::of(32.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `a + bi` from real parts.
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Real number promoted to a complex scalar.
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}
