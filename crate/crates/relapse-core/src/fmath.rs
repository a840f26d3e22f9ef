//! Float math fallback for `no_std` builds.
//!
//! The handful of transcendental operations used by the crate are provided
//! as a trait backed by `libm` when the standard library is unavailable.
//! Under `std` this module is not compiled and the inherent `f64` methods
//! are used directly.

pub(crate) trait FloatExt {
    fn sqrt(self) -> Self;
    fn cbrt(self) -> Self;
    fn cos(self) -> Self;
    fn acos(self) -> Self;
    fn powf(self, e: Self) -> Self;
}

impl FloatExt for f64 {
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn cbrt(self) -> f64 {
        libm::cbrt(self)
    }
    #[inline]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn acos(self) -> f64 {
        libm::acos(self)
    }
    #[inline]
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
}
