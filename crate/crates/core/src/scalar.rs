//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }

    /// Lossy widening to `f64`, used for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `max(requested, factor * epsilon)`: a tolerance that stays meaningful
    /// at reduced precision.
    #[inline]
    fn tol(requested: f64, factor: f64) -> Self {
        let floor = Self::epsilon() * Self::of(factor);
        let req = Self::of(requested);
        if req > floor {
            req
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_tracks_precision() {
        assert_eq!(<f64 as Real>::tol(1e-9, 100.0), 1e-9);
        assert!(<f32 as Real>::tol(1e-9, 100.0) > 1e-6);
    }
}
