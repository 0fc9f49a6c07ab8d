//! Scalar abstraction: every module in this crate is generic over the real
//! floating-point type backing complex arithmetic.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Real scalar type for all numerics (`f32`, `f64`).
///
/// The blanket impl covers any float with the usual constants and primitive
/// conversions; user code never implements this directly.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal must be representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// Builds a complex constant from `f64` parts.
pub fn cplx<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// The imaginary unit.
pub fn i_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// `2 pi i`, the period of the exponential covering.
pub fn two_pi_i<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::TAU())
}
