//! Scalar abstraction shared by every numeric kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the numeric kernels are generic over.
///
/// The kernels only need ordinary float arithmetic plus conversions from the
/// integer counts that graphs produce (degrees, community sizes, pair counts),
/// so `f32` and `f64` are the only implementors.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant or accumulator.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real scalar")
    }

    /// Shorthand for converting an integer count.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable in every Real scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
