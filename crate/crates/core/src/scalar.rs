use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point type the simulator and formulas are generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn usize(k: usize) -> Self {
        Self::from_usize(k).expect("index not representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub fn gamma<T: Scalar>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.f64()))
}

pub fn beta_fn<T: Scalar>(a: T, b: T) -> T {
    T::lit(statrs::function::beta::beta(a.f64(), b.f64()))
}

/// Standard normal cdf.
pub fn norm_cdf<T: Scalar>(x: T) -> T {
    T::lit(0.5 * statrs::function::erf::erfc(-x.f64() / std::f64::consts::SQRT_2))
}

/// `(1+x)^q - 1` without cancellation for small `x`.
pub fn pow1pm1<T: Scalar>(x: T, q: T) -> T {
    (q * x.ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::usize(7), 7.0);
    }

    #[test]
    fn special_functions() {
        assert!((gamma(5.0f64) - 24.0).abs() < 1e-10);
        assert!((beta_fn(2.0f64, 3.0) - 1.0 / 12.0).abs() < 1e-12);
        assert!((norm_cdf(0.0f64) - 0.5).abs() < 1e-15);
        let q = norm_cdf(1.959963984540054f64);
        assert!((q - 0.975).abs() < 1e-11, "{q}");
    }

    #[test]
    fn pow1pm1_small_argument() {
        let x = 1e-12f64;
        // second-order term 1.875e-24 is below f64 resolution here
        assert!((pow1pm1(x, -1.5) / -1.5e-12 - 1.0).abs() < 1e-11);
    }
}
