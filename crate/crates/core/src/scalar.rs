//! Scalar abstraction shared by real and complex evaluation paths.

use num_complex::{Complex64, ComplexFloat};
use std::fmt::Debug;

/// A field element usable as a recurrence coefficient or evaluation point.
///
/// Implemented for `f64` and `Complex64`. Moduli are always reported as `f64`.
pub trait Scalar:
    ComplexFloat<Real = f64> + From<f64> + Debug + Default + Send + Sync + 'static
{
    /// Embed a real number.
    #[inline]
    fn real(x: f64) -> Self {
        <Self as From<f64>>::from(x)
    }

    /// Modulus |z|.
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }

    /// Lossless view as a complex number.
    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re(), self.im())
    }

    /// True when both components are finite.
    #[inline]
    fn finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Relative distance |a-b| / max(1, |b|).
pub fn rel_dev<T: Scalar>(a: T, b: T) -> f64 {
    (a - b).modulus() / b.modulus().max(1.0)
}

/// Relative distance |a-b| / |b| with a floor to avoid division by zero.
pub fn rel_err<T: Scalar>(a: T, b: T) -> f64 {
    let d = (a - b).modulus();
    let s = b.modulus();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
