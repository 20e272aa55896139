use crate::error::{Error, Result};
use crate::scalar::Real;

/// A probability together with its complement.
///
/// Both tails are stored so that values close to one keep their precision:
/// a chi-square upper tail of `1e-30` survives even though `1 - 1e-30 == 1`
/// in floating point. Quantile inversion uses whichever tail is smaller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability<T> {
    lower: T,
    upper: T,
}

impl<T: Real> Probability<T> {
    /// `value` in `[0, 1]`; the complement is `1 - value`.
    pub fn new(value: T) -> Result<Self> {
        if !(value >= T::zero() && value <= T::one()) {
            return Err(Error::Domain(format!("probability {value} outside [0, 1]")));
        }
        Ok(Self {
            lower: value,
            upper: T::one() - value,
        })
    }

    /// The probability `1 - complement`, keeping `complement` exactly.
    pub fn complement_of(complement: T) -> Result<Self> {
        Ok(Self::new(complement)?.flip())
    }

    pub(crate) fn from_tails(lower: T, upper: T) -> Self {
        let clamp = |v: T| v.max(T::zero()).min(T::one());
        Self {
            lower: clamp(lower),
            upper: clamp(upper),
        }
    }

    #[inline]
    pub fn value(&self) -> T {
        self.lower
    }

    /// `1 - value`, carried at full precision.
    #[inline]
    pub fn complement(&self) -> T {
        self.upper
    }

    /// Swaps the roles of the two tails.
    pub fn flip(self) -> Self {
        Self {
            lower: self.upper,
            upper: self.lower,
        }
    }
}
