use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};
use crate::model::{ModelId, MAX_PREDICTORS};
use crate::scalar::Real;

use super::{Family, RANK_TOL};

/// Response, full design (intercept first) and family.
///
/// Immutable after construction. For the Gaussian family the triangular
/// factor of `[X | y]` is kept, so every submodel least-squares problem is
/// solved in `p + 2` dimensions instead of `n`.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    y: Vec<T>,
    x: Matrix<T>,
    family: Family,
    names: Vec<String>,
    reduced: Option<Matrix<T>>,
    key: u64,
}

impl<T: Real> Dataset<T> {
    /// `design` must carry an all-ones intercept as its first column;
    /// `names` labels every design column.
    pub fn new(y: Vec<T>, design: Matrix<T>, family: Family, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        let width = design.cols();
        if design.rows() != n {
            return Err(Error::Validation(format!(
                "response has {n} rows but design has {}",
                design.rows()
            )));
        }
        if width == 0 || design.col(0).iter().any(|&v| v != T::one()) {
            return Err(Error::Validation("first design column must be the all-ones intercept".into()));
        }
        if names.len() != width {
            return Err(Error::Validation(format!(
                "{} column names for {width} design columns",
                names.len()
            )));
        }
        let p = width - 1;
        if p > MAX_PREDICTORS {
            return Err(Error::Validation(format!("at most {MAX_PREDICTORS} predictors are supported")));
        }
        if n <= width {
            return Err(Error::Validation(format!(
                "need more observations than design columns (n={n}, p+1={width})"
            )));
        }
        for j in 0..width {
            if let Some(i) = design.col(j).iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("non-finite value in column {} row {}", names[j], i + 1)));
            }
        }
        for (i, &v) in y.iter().enumerate() {
            if let Some(reason) = family.check_response(v) {
                return Err(Error::InvalidResponse {
                    row: i + 1,
                    reason: format!("{reason} (got {v})"),
                });
            }
        }

        let qr = Qr::new(design.clone());
        let bad = qr.deficient_columns(T::of(RANK_TOL));
        if !bad.is_empty() {
            return Err(Error::SingularDesign {
                columns: bad.into_iter().map(|j| names[j].clone()).collect(),
            });
        }

        let reduced = (family == Family::Gaussian).then(|| {
            let mut cols: Vec<Vec<T>> = (0..width).map(|j| design.col(j).to_vec()).collect();
            cols.push(y.clone());
            Qr::new(Matrix::from_columns(&cols)).r()
        });

        let mut h = DefaultHasher::new();
        family.hash(&mut h);
        n.hash(&mut h);
        width.hash(&mut h);
        for v in y.iter().chain((0..width).flat_map(|j| design.col(j).iter())) {
            v.to_f64_lossy().to_bits().hash(&mut h);
        }

        Ok(Self {
            y,
            x: design,
            family,
            names,
            reduced,
            key: h.finish(),
        })
    }

    /// Prepends the intercept to predictor columns.
    pub fn from_predictors(
        y: Vec<T>,
        predictors: &[Vec<T>],
        predictor_names: &[String],
        family: Family,
    ) -> Result<Self> {
        if predictors.len() != predictor_names.len() {
            return Err(Error::Validation("one name per predictor column required".into()));
        }
        let n = y.len();
        if let Some(c) = predictors.iter().position(|c| c.len() != n) {
            return Err(Error::Validation(format!("predictor {} has wrong length", predictor_names[c])));
        }
        let mut cols = Vec::with_capacity(predictors.len() + 1);
        cols.push(vec![T::one(); n]);
        cols.extend(predictors.iter().cloned());
        let mut names = Vec::with_capacity(cols.len());
        names.push("(Intercept)".to_string());
        names.extend(predictor_names.iter().cloned());
        Self::new(y, Matrix::from_columns(&cols), family, names)
    }

    /// Same as [`from_predictors`](Self::from_predictors) with names `x1..xp`.
    pub fn from_unnamed(y: Vec<T>, predictors: &[Vec<T>], family: Family) -> Result<Self> {
        let names: Vec<String> = (1..=predictors.len()).map(|i| format!("x{i}")).collect();
        Self::from_predictors(y, predictors, &names, family)
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of predictors, excluding the intercept.
    pub fn p(&self) -> usize {
        self.x.cols() - 1
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn design(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Design column labels, intercept first.
    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    /// Names of the predictors in `model`.
    pub fn model_names(&self, model: ModelId) -> Vec<String> {
        model.indices().into_iter().map(|i| self.names[i + 1].clone()).collect()
    }

    pub fn full_model(&self) -> ModelId {
        ModelId::full(self.p())
    }

    pub(crate) fn reduced(&self) -> Option<&Matrix<T>> {
        self.reduced.as_ref()
    }

    /// Content fingerprint used to catch fits from different datasets.
    pub fn key(&self) -> u64 {
        self.key
    }

    /// Copy with predictor columns reordered: new predictor `k` is old
    /// predictor `order[k]`.
    pub fn permute_predictors(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.p() {
            return Err(Error::Usage("permutation length must equal p".into()));
        }
        let mut cols = vec![0];
        cols.extend(order.iter().map(|&i| i + 1));
        let names = cols.iter().map(|&j| self.names[j].clone()).collect();
        Self::new(self.y.clone(), self.x.select_columns(&cols), self.family, names)
    }
}
