//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar backing amplitudes, energies and times: `f32` or `f64`.
///
/// All simulation types are generic over this trait. The published
/// experiment numbers need double precision; `f32` is supported for cheap
/// exploratory runs and is checked against looser tolerances.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// A checking tolerance, floored at what this precision can resolve.
    fn tol(tol: f64) -> Self {
        Self::of(tol).max(Self::epsilon() * Self::of(1024.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `i^k` without any rounding.
pub(crate) fn i_pow<T: Real>(k: u64) -> C<T> {
    match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}

/// Integer power of a complex number by repeated squaring.
pub(crate) fn cpow<T: Real>(z: C<T>, mut k: u64) -> C<T> {
    let mut base = z;
    let mut acc = c(T::one(), T::zero());
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}
