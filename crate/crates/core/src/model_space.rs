//! Enumeration of candidate models and the per-size maximum likelihood set.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{fit_submodel, Dataset, FitResult};
use crate::model::ModelId;
use crate::scalar::Real;

/// Default largest `p` searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 25;

/// Absolute log-likelihood gap treated as a tie between candidates.
pub const TIE_TOL: f64 = 1e-10;

/// Tolerance on the size-monotonicity of the ML set.
pub const MONOTONE_TOL: f64 = 1e-8;

/// Limits of the model search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest model size considered; `None` means all `p` predictors.
    pub max_size: Option<usize>,
    pub exhaustive_limit: usize,
    /// Fit candidates on the rayon pool.
    pub parallel: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_size: None,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            parallel: true,
        }
    }
}

impl SearchBudget {
    pub fn capped(max_size: usize) -> Self {
        Self {
            max_size: Some(max_size),
            ..Self::default()
        }
    }

    pub fn serial(self) -> Self {
        Self { parallel: false, ..self }
    }

    /// Effective cap `k` for `data`, after validation.
    pub fn resolve<T: Real>(&self, data: &Dataset<T>) -> Result<usize> {
        let p = data.p();
        if p > self.exhaustive_limit {
            return Err(Error::SearchTooLarge {
                p,
                limit: self.exhaustive_limit,
            });
        }
        let k = self.max_size.unwrap_or(p);
        if k > p {
            return Err(Error::Usage(format!("max model size {k} exceeds p={p}")));
        }
        if k + 1 >= data.n() {
            return Err(Error::Usage(format!("max model size {k} requires n > {}", k + 1)));
        }
        Ok(k)
    }
}

/// Size-`j` subsets of `p` predictors in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    p: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = ModelId;

    fn next(&mut self) -> Option<ModelId> {
        let cur = self.current.as_mut()?;
        let out = ModelId::from_indices(cur).expect("index below MAX_PREDICTORS");
        let j = cur.len();
        // Advance to the next combination.
        let mut i = j;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.p - j + i {
                cur[i] += 1;
                for k in i + 1..j {
                    cur[k] = cur[k - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All `C(p, j)` models with exactly `j` predictors.
pub fn models_of_size(p: usize, j: usize) -> Result<Combinations> {
    if j > p {
        return Err(Error::Domain(format!("model size {j} outside [0, {p}]")));
    }
    if p > crate::model::MAX_PREDICTORS {
        return Err(Error::Domain(format!("p={p} exceeds the supported predictor count")));
    }
    Ok(Combinations {
        p,
        current: Some((0..j).collect()),
    })
}

/// Best model of one size together with its fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlEntry<T> {
    pub size: usize,
    pub model: ModelId,
    pub fit: FitResult<T>,
}

/// Highest-likelihood model of size `j`.
///
/// Ties within [`TIE_TOL`] go to the lexicographically smallest model, so
/// the answer does not depend on scheduling. Warnings from non-converged
/// candidate fits are returned alongside.
pub fn best_of_size<T: Real>(data: &Dataset<T>, j: usize, budget: &SearchBudget) -> Result<(MlEntry<T>, Vec<String>)> {
    let k = budget.resolve(data)?;
    if j > k {
        return Err(Error::Domain(format!("model size {j} exceeds the search cap {k}")));
    }
    scan_size(data, j, budget.parallel)
}

type Scored = (ModelId, Result<(f64, Option<String>)>);

fn scan_size<T: Real>(data: &Dataset<T>, j: usize, parallel: bool) -> Result<(MlEntry<T>, Vec<String>)> {
    let candidates: Vec<ModelId> = models_of_size(data.p(), j)?.collect();
    let score = |m: &ModelId| -> Scored {
        let r = fit_submodel(data, *m).map(|f| (f.loglik.to_f64_lossy(), f.warning));
        (*m, r)
    };
    let scored: Vec<Scored> = if parallel && candidates.len() > 1 {
        candidates.par_iter().map(score).collect()
    } else {
        candidates.iter().map(score).collect()
    };

    let mut ok = Vec::with_capacity(scored.len());
    let mut warnings = Vec::new();
    for (m, r) in scored {
        match r {
            Ok((ll, w)) => {
                warnings.extend(w);
                ok.push((m, ll));
            }
            Err(e) => {
                return Err(Error::Candidate {
                    model: format!("{m} ({})", data.model_names(m).join(", ")),
                    source: Box::new(e),
                })
            }
        }
    }
    let best_ll = ok.iter().map(|&(_, ll)| ll).fold(f64::NEG_INFINITY, f64::max);
    let tie = TIE_TOL.max(8.0 * T::epsilon().to_f64_lossy() * best_ll.abs().max(1.0));
    let winner = ok
        .iter()
        .filter(|&&(_, ll)| ll >= best_ll - tie)
        .map(|&(m, _)| m)
        .min()
        .ok_or_else(|| Error::Internal(format!("no candidates of size {j}")))?;
    let fit = fit_submodel(data, winner)?;
    Ok((
        MlEntry {
            size: j,
            model: winner,
            fit,
        },
        warnings,
    ))
}

/// The maximum likelihood set `{M*_0, …, M*_k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlSet<T> {
    pub entries: Vec<MlEntry<T>>,
    pub max_size: usize,
    /// Full-model fit, the reference for likelihood ratios.
    pub full_fit: FitResult<T>,
    pub n: usize,
    pub p: usize,
    pub warnings: Vec<String>,
}

impl<T: Real> MlSet<T> {
    pub fn entry(&self, j: usize) -> Option<&MlEntry<T>> {
        self.entries.get(j)
    }
}

pub fn ml_set<T: Real>(data: &Dataset<T>, budget: &SearchBudget) -> Result<MlSet<T>> {
    let k = budget.resolve(data)?;
    let mut entries = Vec::with_capacity(k + 1);
    let mut warnings = Vec::new();
    for j in 0..=k {
        let (entry, w) = scan_size(data, j, budget.parallel)?;
        warnings.extend(w);
        entries.push(entry);
    }
    let full_fit = if k == data.p() {
        entries[k].fit.clone()
    } else {
        fit_submodel(data, data.full_model())?
    };
    if let Some(w) = &full_fit.warning {
        if k != data.p() {
            warnings.push(w.clone());
        }
    }
    let tol = T::of(MONOTONE_TOL);
    for pair in entries.windows(2) {
        if pair[0].fit.loglik > pair[1].fit.loglik + tol {
            warnings.push(format!(
                "log-likelihood decreases from size {} to {}; a fit is not at its optimum",
                pair[0].size, pair[1].size
            ));
        }
    }
    Ok(MlSet {
        entries,
        max_size: k,
        full_fit,
        n: data.n(),
        p: data.p(),
        warnings,
    })
}
