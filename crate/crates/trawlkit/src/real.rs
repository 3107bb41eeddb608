//! Scalar abstraction: the numeric kernels are generic over `f32`/`f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, NumCast};

/// Floating point scalar used throughout the library.
///
/// All deterministic numerics (areas, quadrature, slice plans, transform
/// inversion) are generic over this trait. Random draws are produced in
/// `f64` and converted, which preserves the sampled law for any scalar.
pub trait Real:
    Float + FromPrimitive + NumAssign + NumCast + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion for literals and precomputed constants.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite f64 converts to any Real")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
