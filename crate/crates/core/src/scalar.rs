//! Scalar abstraction for the numerical core.
//!
//! All channel, rate, and solver math is generic over [`Scalar`] so the same
//! code runs in `f32` or `f64`. The crate root exports `f64` aliases for the
//! main types; `f64` is what the CLI and the benchmark campaigns use.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the allocation core.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Lossy conversion from `f64`, for constants and RNG draws.
pub(crate) fn cast<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("f64 constant must be representable in the scalar type")
}

/// Conversion to `f64` for reporting and aggregation.
pub(crate) fn to_f64<T: Scalar>(value: T) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_scalar<T: Scalar>() {}

    #[test]
    fn standard_floats_are_scalars() {
        assert_scalar::<f32>();
        assert_scalar::<f64>();
    }

    #[test]
    fn cast_round_trips() {
        let x: f32 = cast(1.5);
        assert_eq!(x, 1.5f32);
        assert_eq!(to_f64(2.0f64), 2.0);
    }
}
