use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Complex scalar used for operators and density matrices.
pub type Cplx<T> = nalgebra::Complex<T>;

// Every numerical routine in the crate is written against `Real` so the
// same code runs in f32 (fast sweeps, smoke checks) and f64 (reference runs).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the scalar type.
    #[inline]
    fn eps() -> Self {
        Self::default_epsilon()
    }

    /// Smallest positive normal value.
    fn tiny() -> Self;
}

impl Real for f32 {
    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn tiny() -> Self {
        f64::MIN_POSITIVE
    }
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T) -> Cplx<T> {
    Cplx::new(re, T::zero())
}
