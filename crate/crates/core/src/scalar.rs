//! Scalar abstractions shared by the matrix and expression code.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Entry type of a [`Matrix4`](crate::linalg::Matrix4): real or complex.
pub trait Field:
    Copy + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Absolute value (real) or modulus (complex), widened to `f64`.
    fn modulus(self) -> f64;

    fn from_real(value: f64) -> Self;
}

/// Real floating point scalar: `f32` or `f64`.
pub trait Real: Field + Float + FloatConst + FromPrimitive {}

macro_rules! impl_real {
    ($t:ty) => {
        impl Field for $t {
            #[inline]
            fn modulus(self) -> f64 {
                f64::from(self.abs())
            }

            #[inline]
            fn from_real(value: f64) -> Self {
                value as $t
            }
        }

        impl Real for $t {}

        impl Field for Complex<$t> {
            #[inline]
            fn modulus(self) -> f64 {
                f64::from(self.norm())
            }

            #[inline]
            fn from_real(value: f64) -> Self {
                Complex::new(value as $t, 0.0)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_of_complex_is_norm() {
        let z = Complex::new(3.0_f64, 4.0);
        assert_eq!(z.modulus(), 5.0);
        assert_eq!((-2.5_f32).modulus(), 2.5);
    }
}
