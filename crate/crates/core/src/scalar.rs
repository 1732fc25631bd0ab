//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point type the toolkit can compute in: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every value we feed through here is finite
    /// and representable, so the conversion cannot fail for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_index(i: usize) -> Self {
        Self::from_usize(i).expect("index fits in a float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance used to stop Jacobi sweeps.
    fn jacobi_tolerance() -> Self;
}

impl Scalar for f64 {
    fn jacobi_tolerance() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    fn jacobi_tolerance() -> Self {
        4.0 * f32::EPSILON
    }
}

/// `exp(j * phase)`.
#[inline]
pub fn cis<T: Scalar>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}
