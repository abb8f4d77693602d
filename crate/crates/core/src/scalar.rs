//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used when validating stochastic vectors: `max(base, 64 ulp)`.
    fn stochastic_tol(base: f64) -> Self {
        Self::lit(base).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x * log2(x / y)` with the conventions `0 log(0/y) = 0` and `x log(x/0) = +inf`.
#[inline]
pub(crate) fn xlog_ratio<T: Real>(x: T, y: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if y <= T::zero() {
        T::infinity()
    } else {
        x * (x / y).log2()
    }
}

/// `-x log2 x` with `0 log 0 = 0`.
#[inline]
pub(crate) fn neg_xlogx<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}

/// Sums in a fixed left-to-right order so results do not depend on iterator adaptors.
#[inline]
pub(crate) fn ordered_sum<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::zero(), |acc, x| acc + x)
}

/// `log2(sum 2^x)` over the finite entries, `-inf` when none are finite.
pub(crate) fn log2_sum_exp2<T: Real>(xs: impl IntoIterator<Item = T> + Clone) -> T {
    let max = xs
        .clone()
        .into_iter()
        .fold(T::neg_infinity(), |m, x| if x > m { x } else { m });
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let s = ordered_sum(xs.into_iter().map(|x| (x - max).exp2()));
    max + s.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(xlog_ratio(0.0_f64, 0.0), 0.0);
        assert_eq!(xlog_ratio(0.5_f64, 0.0), f64::INFINITY);
        assert_eq!(neg_xlogx(0.0_f64), 0.0);
        assert!((neg_xlogx(0.5_f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp() {
        let v = [1.0_f64, 1.0];
        assert!((log2_sum_exp2(v.iter().copied()) - 2.0).abs() < 1e-15);
        let e: [f64; 2] = [f64::NEG_INFINITY, f64::NEG_INFINITY];
        assert_eq!(log2_sum_exp2(e.iter().copied()), f64::NEG_INFINITY);
        let f32v = [3.0_f32, f32::NEG_INFINITY];
        assert_eq!(log2_sum_exp2(f32v.iter().copied()), 3.0);
    }
}
