//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, ToPrimitive};

/// Real field the lab computes over.
///
/// Implemented for `f32` and `f64`. Complex quantities are always
/// `Complex<T>` for the same `T`.
pub trait Real: RealField + Copy + FloatConst + ToPrimitive {
    /// Unit roundoff of the type.
    fn unit_roundoff() -> Self;
}

impl Real for f32 {
    fn unit_roundoff() -> Self {
        f32::EPSILON / 2.0
    }
}

impl Real for f64 {
    fn unit_roundoff() -> Self {
        f64::EPSILON / 2.0
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a `usize` count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Modulus of a complex number without intermediate overflow.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn conj<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.re, -z.im)
}

/// `exp(i * theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Maps a complex value to `(re, im)` in `f64`.
#[inline]
pub fn c_to_f64<T: Real>(z: Complex<T>) -> (f64, f64) {
    (to_f64(z.re), to_f64(z.im))
}

/// Absolute value of a real (sidesteps the `Signed`/`ComplexField` overlap).
#[inline]
pub fn abs<T: Real>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

#[inline]
pub fn max_of<T: Real>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

#[inline]
pub fn min_of<T: Real>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}
