//! Scalar abstraction for the numerical core.
//!
//! Everything numeric in this crate is generic over [`Real`] so the same
//! routines run in `f64` (the default used by the estimators and the
//! simulation harness) or `f32`. The trait is a closed bundle of the
//! `num-traits` capabilities the algorithms actually touch, plus two
//! conversion helpers so constants written as `f64` literals lift cleanly.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the numerical routines are generic over.
///
/// Implemented automatically for any type with the listed capabilities;
/// in practice that is `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lifts an `f64` constant into this scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant must be representable")
    }

    /// Views the scalar as `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
