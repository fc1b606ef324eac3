//! Floating scalar abstraction.
//!
//! All float-valued numerics (kernel jets, evaluation, variation, porosity
//! trials) are generic over [`Scalar`] so they run in `f32` as well as `f64`.
//! Exact set/interval work stays rational and never goes through here.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for the frequent f64-literal conversion.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal not representable")
    }

    fn two_pi() -> Self {
        Self::of(std::f64::consts::TAU)
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
