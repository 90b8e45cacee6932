//! Scalar abstraction shared by every numeric module.
//!
//! All feature formulas, parse scores and model weights are generic over
//! [`Real`], which is implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point: f32 or f64.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal constant. Panics only if the type cannot hold it,
    /// which never happens for the constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `num / den`, or zero when the denominator is zero or the quotient is not finite.
#[inline]
pub fn ratio<T: Real>(num: T, den: T) -> T {
    if den == T::zero() {
        return T::zero();
    }
    let q = num / den;
    if q.is_finite() {
        q
    } else {
        T::zero()
    }
}

/// Ratio of two counts with the zero-denominator rule.
#[inline]
pub fn count_ratio<T: Real>(num: usize, den: usize) -> T {
    ratio(T::of_usize(num), T::of_usize(den))
}

/// Arithmetic mean; zero for an empty slice.
pub fn mean<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    values.iter().copied().sum::<T>() / T::of_usize(values.len())
}

/// Population standard deviation; zero for fewer than two values.
pub fn population_std<T: Real>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let m = mean(values);
    let var = values.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::of_usize(values.len());
    var.sqrt()
}
