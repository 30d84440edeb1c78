//! Scalar abstraction shared by the exact and the floating-point code paths.
//!
//! The scattering blocks, the generalized edge matrix and the multivariate
//! polynomial machinery only need ring operations plus small rational
//! constants, so they are written once against [`Scalar`] and instantiated
//! with `f64`, `Complex64` or `BigRational`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};
use std::fmt::Debug;
use std::ops::Neg;

pub trait Scalar: Num + Clone + Neg<Output = Self> + Debug + 'static {
    /// `num / den` in this scalar type. Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                assert!(den != 0, "zero denominator");
                num as $t / den as $t
            }

            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().map(|v| v as $t).unwrap_or(<$t>::NAN)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl<T> Scalar for Complex<T>
where
    T: Scalar,
{
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(T::from_ratio(num, den), T::zero())
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex::new(T::from_rational(r), T::zero())
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Conversion of polynomial coefficients into an evaluation scalar.
pub trait FromCoefficient<C> {
    fn from_coefficient(c: &C) -> Self;
}

impl<U: Scalar> FromCoefficient<BigRational> for U {
    fn from_coefficient(c: &BigRational) -> Self {
        U::from_rational(c)
    }
}

impl FromCoefficient<f64> for f64 {
    fn from_coefficient(c: &f64) -> Self {
        *c
    }
}

impl FromCoefficient<f64> for Complex<f64> {
    fn from_coefficient(c: &f64) -> Self {
        Complex::new(*c, 0.0)
    }
}

impl FromCoefficient<Complex<f64>> for Complex<f64> {
    fn from_coefficient(c: &Complex<f64>) -> Self {
        *c
    }
}
