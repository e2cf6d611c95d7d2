//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type usable throughout the crate (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Converts an index or count into `Self`.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Lossy conversion to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for [`Scalar::of`].
#[inline]
pub(crate) fn c<T: Scalar>(x: f64) -> T {
    T::of(x)
}

/// Shorthand for [`Scalar::of_usize`].
#[inline]
pub(crate) fn cn<T: Scalar>(n: usize) -> T {
    T::of_usize(n)
}

/// `x^y` with the convention `0^0 = 1`.
#[inline]
pub(crate) fn pow0<T: Scalar>(x: T, y: T) -> T {
    if y == T::zero() {
        T::one()
    } else {
        x.powf(y)
    }
}
