//! Floating-point scalar abstraction.
//!
//! Every numeric routine in the crate is written against [`Scalar`], which is
//! implemented for `f32` and `f64`. The trait bundles the `num-traits` float
//! surface, what `ndarray` needs for dense products, and a small LAPACK
//! dispatch table for symmetric eigenproblems.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

use crate::linalg::SymmetricEigenKernel;

/// Real floating point type usable by every routine in this crate.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + LinalgScalar
    + ScalarOperand
    + SampleUniform
    + SymmetricEigenKernel
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + serde::Serialize
    + for<'de> serde::Deserialize<'de>
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count.
    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Tolerance floor for comparisons that would be `tol` in exact arithmetic:
    /// never tighter than a few hundred ulps of the type.
    #[inline]
    fn tol(tol: f64) -> Self {
        Self::of(tol).max(Self::epsilon() * Self::of(256.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
