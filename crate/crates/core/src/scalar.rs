use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the solver and the model are generic over (`f32`, `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_index(k: usize) -> Self {
        Self::from_usize(k).expect("index representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
