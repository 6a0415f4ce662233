//! Floating-point abstraction shared by all geometric code.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Coordinate scalar: `f32` or `f64`.
///
/// Geometry, indexing, normals and ray casting are generic over this trait.
/// Aggregated quantities that end up in reports are always carried as `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Lossless widening to `f64`.
    fn to_f64_lossless(self) -> f64;

    /// Nearest representable value of `v`.
    fn from_f64_lossy(v: f64) -> Self;

    /// Small literal, `Self::from_f64_lossy(v)`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64_lossy(v)
    }
}

impl Scalar for f32 {
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self as f64
    }
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self
    }
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}
