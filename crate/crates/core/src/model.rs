use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of predictors a [`ModelId`] can address.
pub const MAX_PREDICTORS: usize = 64;

/// A submodel, identified by the set of non-intercept predictors it uses.
///
/// Bit `i` selects predictor `x_{i+1}` (design column `i + 1`). The
/// intercept is always part of the model.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelId(u64);

impl ModelId {
    pub const INTERCEPT_ONLY: ModelId = ModelId(0);

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    /// Model containing all `p` predictors.
    pub fn full(p: usize) -> Self {
        assert!(p <= MAX_PREDICTORS);
        if p == MAX_PREDICTORS {
            Self(u64::MAX)
        } else {
            Self((1u64 << p) - 1)
        }
    }

    /// From zero-based predictor indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i >= MAX_PREDICTORS {
                return Err(Error::Domain(format!("predictor index {i} out of range")));
            }
            mask |= 1 << i;
        }
        Ok(Self(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Number of predictors (excluding the intercept).
    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, predictor: usize) -> bool {
        predictor < MAX_PREDICTORS && self.0 & (1 << predictor) != 0
    }

    pub fn is_superset_of(self, other: ModelId) -> bool {
        self.0 & other.0 == other.0
    }

    /// Zero-based predictor indices, ascending.
    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size());
        let mut m = self.0;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }

    /// Design-matrix columns: the intercept followed by the predictors.
    pub fn design_columns(self) -> Vec<usize> {
        std::iter::once(0).chain(self.indices().into_iter().map(|i| i + 1)).collect()
    }

    /// Predictors selected here but absent from `other`.
    pub fn difference(self, other: ModelId) -> ModelId {
        ModelId(self.0 & !other.0)
    }

    pub fn highest_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }
}

/// Lexicographic order of the ascending index lists.
impl Ord for ModelId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(&other.indices())
    }
}

impl PartialOrd for ModelId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "x{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModelId{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_and_columns() {
        let m = ModelId::from_indices(&[0, 2]).unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.design_columns(), vec![0, 1, 3]);
        assert_eq!(m.to_string(), "{x1,x3}");
        assert_eq!(ModelId::INTERCEPT_ONLY.to_string(), "{}");
        assert_eq!(ModelId::full(4).mask(), 0b1111);
        assert_eq!(m.highest_index(), Some(2));
    }

    #[test]
    fn lexicographic_order() {
        let a = ModelId::from_indices(&[0, 1]).unwrap();
        let b = ModelId::from_indices(&[0, 4]).unwrap();
        let c = ModelId::from_indices(&[1, 2]).unwrap();
        assert!(a < b && b < c);
        // Numeric mask order differs: {x1,x5}=17 > {x2,x3}=6.
        assert!(b.mask() > c.mask());
    }
}
