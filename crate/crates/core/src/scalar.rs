//! Floating-point abstraction shared by every model in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::FftNum;

/// Real scalar the simulator is generic over: `f32` or `f64`.
///
/// `FftNum` brings `num_traits::Signed` into scope alongside `Float`, so
/// `abs`/`signum` must be called as `Float::abs(x)` in generic code.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + FftNum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 constant representable in scalar type")
    }

    /// Converts a count into this scalar type.
    fn count(value: usize) -> Self {
        Self::from_usize(value).expect("count representable in scalar type")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
