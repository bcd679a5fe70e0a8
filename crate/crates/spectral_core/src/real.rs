use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar the field algebra is generic over.
///
/// Implemented for `f32` and `f64`; statistics downstream are always
/// accumulated in `f64`.
pub trait Real: Float + FloatConst + FftNum + Default + Display + Sum {
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("constant representable in scalar type")
    }

    /// Widens to `f64` for statistics and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
