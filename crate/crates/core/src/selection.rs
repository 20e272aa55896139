//! The constrained minimum criterion and information-criterion baselines
//! over the maximum likelihood set.
//!
//! CMC picks the sparsest submodel MLE inside the likelihood-ratio region
//! `{β : λ(β) <= T}` of the full model. Because the size-`j` model with the
//! smallest `λ` is the size-`j` member of the ML set, scanning `j = 0, 1, …`
//! over that set reproduces the argmin over all `2^p` models, with
//! likelihood as the tie-break among models of equal size.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{Dataset, FitResult};
use crate::model::ModelId;
use crate::model_space::{ml_set, MlSet, SearchBudget};
use crate::scalar::Real;
use crate::stats::{chi2_quantile, chi2_sf, ChiSquare, Probability};

/// Slack allowed for a slightly negative likelihood ratio.
pub const LAMBDA_TOL: f64 = 1e-8;

/// How the confidence level of the region is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum AlphaMode<T> {
    /// Fixed level: threshold is the `1 - α` chi-square quantile.
    #[serde(rename = "alpha")]
    Fixed(T),
    /// `α_n = 1 - P(χ²_{p+1} <= n^γ)`, i.e. threshold `n^γ`.
    #[serde(rename = "gamma")]
    Schedule(T),
}

impl<T: Real> Default for AlphaMode<T> {
    fn default() -> Self {
        AlphaMode::Schedule(T::of(0.5))
    }
}

impl<T: Real> AlphaMode<T> {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            AlphaMode::Fixed(a) => ("alpha", a),
            AlphaMode::Schedule(g) => ("gamma", g),
        };
        if v > T::zero() && v < T::one() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")))
        }
    }
}

impl<T: Real> fmt::Display for AlphaMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Fixed(a) => write!(f, "alpha={a}"),
            AlphaMode::Schedule(g) => write!(f, "gamma={g}"),
        }
    }
}

/// Region threshold on the chi-square scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold<T> {
    pub value: T,
    pub alpha_effective: T,
    pub df: u32,
    pub mode: AlphaMode<T>,
}

pub fn make_threshold<T: Real>(mode: AlphaMode<T>, n: usize, p: usize) -> Result<Threshold<T>> {
    mode.validate()?;
    if n <= p + 1 {
        return Err(Error::Domain(format!("threshold requires n > p + 1 (n={n}, p={p})")));
    }
    let df = u32::try_from(p + 1).map_err(|_| Error::Domain("too many predictors".into()))?;
    let dist = ChiSquare::new(df)?;
    let (value, alpha_effective) = match mode {
        AlphaMode::Fixed(alpha) => (chi2_quantile(Probability::complement_of(alpha)?, dist)?, alpha),
        AlphaMode::Schedule(gamma) => {
            let value = T::of_usize(n).powf(gamma);
            (value, chi2_sf(value, dist)?)
        }
    };
    Ok(Threshold {
        value,
        alpha_effective,
        df,
        mode,
    })
}

/// `λ = -2 (ℓ_j - ℓ_full)`, clamped to zero within rounding noise.
pub fn lambda_of<T: Real>(fit: &FitResult<T>, full: &FitResult<T>) -> Result<T> {
    if fit.dataset_key() != full.dataset_key() {
        return Err(Error::Usage("likelihood ratio of fits from different datasets".into()));
    }
    if !full.model.is_superset_of(fit.model) {
        return Err(Error::Usage(format!(
            "reference fit {} does not contain model {}",
            full.model, fit.model
        )));
    }
    let lambda = -T::of(2.0) * (fit.loglik - full.loglik);
    let slack = T::of(LAMBDA_TOL).max(T::of(64.0) * T::epsilon() * full.loglik.abs().max(T::one()));
    if lambda > T::zero() {
        Ok(lambda)
    } else if lambda >= -slack {
        Ok(T::zero())
    } else {
        Err(Error::Internal(format!(
            "negative likelihood ratio {lambda} for model {}: the full-model fit is not at its maximum",
            fit.model
        )))
    }
}

/// Information criteria with penalty `pen(m)` on `m = j + 1` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoCriterion {
    Aic,
    Bic,
    Hq,
}

impl InfoCriterion {
    pub fn name(self) -> &'static str {
        match self {
            InfoCriterion::Aic => "aic",
            InfoCriterion::Bic => "bic",
            InfoCriterion::Hq => "hq",
        }
    }

    pub fn penalty<T: Real>(self, params: usize, n: usize) -> Result<T> {
        let m = T::of_usize(params);
        let nf = T::of_usize(n);
        Ok(match self {
            InfoCriterion::Aic => T::of(2.0) * m,
            InfoCriterion::Bic => m * nf.ln(),
            InfoCriterion::Hq => {
                if !(nf > T::one().exp()) {
                    return Err(Error::Domain(format!("Hannan-Quinn requires n > e, got n={n}")));
                }
                T::of(2.0) * m * nf.ln().ln()
            }
        })
    }
}

/// A selection rule. Serialized as its label, e.g. `"cmc(alpha=0.1)"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub enum CriterionSpec<T> {
    Cmc(AlphaMode<T>),
    Ic(InfoCriterion),
}

impl<T: Real> CriterionSpec<T> {
    pub fn label(&self) -> String {
        match self {
            CriterionSpec::Cmc(mode) => format!("cmc({mode})"),
            CriterionSpec::Ic(ic) => ic.name().to_string(),
        }
    }

    /// `cmc(gamma=0.5)`, `cmc(alpha=0.1)`, `cmc(alpha=0.5)`, `cmc(alpha=0.9)`, `aic`, `bic`.
    pub fn default_set() -> Vec<Self> {
        vec![
            CriterionSpec::Cmc(AlphaMode::Schedule(T::of(0.5))),
            CriterionSpec::Cmc(AlphaMode::Fixed(T::of(0.1))),
            CriterionSpec::Cmc(AlphaMode::Fixed(T::of(0.5))),
            CriterionSpec::Cmc(AlphaMode::Fixed(T::of(0.9))),
            CriterionSpec::Ic(InfoCriterion::Aic),
            CriterionSpec::Ic(InfoCriterion::Bic),
        ]
    }
}

impl<T: Real> From<CriterionSpec<T>> for String {
    fn from(spec: CriterionSpec<T>) -> String {
        spec.label()
    }
}

impl<T: Real> TryFrom<String> for CriterionSpec<T> {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl<T: Real> fmt::Display for CriterionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Accepts `aic`, `bic`, `hq`, `cmc(gamma=G)`, `cmc(alpha=A)` and the short
/// forms `gamma=G`, `alpha=A`.
impl<T: Real> FromStr for CriterionSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "aic" => return Ok(CriterionSpec::Ic(InfoCriterion::Aic)),
            "bic" => return Ok(CriterionSpec::Ic(InfoCriterion::Bic)),
            "hq" => return Ok(CriterionSpec::Ic(InfoCriterion::Hq)),
            _ => {}
        }
        let inner = t
            .strip_prefix("cmc(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(&t);
        let (key, value) = inner
            .split_once('=')
            .or_else(|| inner.split_once(':'))
            .ok_or_else(|| Error::Usage(format!("unrecognised criterion '{s}'")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("bad number in criterion '{s}'")))?;
        let mode = match key.trim() {
            "alpha" => AlphaMode::Fixed(T::of(v)),
            "gamma" => AlphaMode::Schedule(T::of(v)),
            _ => return Err(Error::Usage(format!("unrecognised criterion '{s}'"))),
        };
        mode.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(CriterionSpec::Cmc(mode))
    }
}

/// One size of the ML set with its likelihood ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRow<T> {
    pub size: usize,
    pub model: ModelId,
    pub loglik: T,
    pub lambda: T,
    /// Inside the region; `None` for information criteria.
    pub in_region: Option<bool>,
    /// Criterion value; `None` for CMC.
    pub score: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct SelectionResult<T> {
    pub criterion: CriterionSpec<T>,
    pub selected: ModelId,
    pub fit: FitResult<T>,
    pub lambda_by_size: Vec<LambdaRow<T>>,
    pub threshold: Option<Threshold<T>>,
    pub warnings: Vec<String>,
}

impl<T: Real> SelectionResult<T> {
    pub fn size(&self) -> usize {
        self.selected.size()
    }

    /// Likelihood ratio of the selected model.
    pub fn lambda(&self) -> T {
        self.lambda_by_size[self.size()].lambda
    }

    /// Information-criterion score of the selected model, if any.
    pub fn score(&self) -> Option<T> {
        self.lambda_by_size[self.size()].score
    }
}

fn lambdas<T: Real>(ml: &MlSet<T>) -> Result<Vec<T>> {
    ml.entries.iter().map(|e| lambda_of(&e.fit, &ml.full_fit)).collect()
}

/// CMC over a precomputed ML set.
pub fn cmc_from_ml_set<T: Real>(ml: &MlSet<T>, mode: AlphaMode<T>) -> Result<SelectionResult<T>> {
    let threshold = make_threshold(mode, ml.n, ml.p)?;
    let lam = lambdas(ml)?;
    let rows: Vec<LambdaRow<T>> = ml
        .entries
        .iter()
        .zip(&lam)
        .map(|(e, &l)| LambdaRow {
            size: e.size,
            model: e.model,
            loglik: e.fit.loglik,
            lambda: l,
            in_region: Some(l <= threshold.value),
            score: None,
        })
        .collect();
    let pick = rows
        .iter()
        .position(|r| r.in_region == Some(true))
        .ok_or_else(|| Error::EmptyRegion {
            max_size: ml.max_size,
            threshold: threshold.value.to_f64_lossy(),
        })?;
    let entry = &ml.entries[pick];
    Ok(SelectionResult {
        criterion: CriterionSpec::Cmc(mode),
        selected: entry.model,
        fit: entry.fit.clone(),
        lambda_by_size: rows,
        threshold: Some(threshold),
        warnings: ml.warnings.clone(),
    })
}

/// Information criterion over a precomputed ML set; ties go to the smaller model.
pub fn ic_from_ml_set<T: Real>(ml: &MlSet<T>, criterion: InfoCriterion) -> Result<SelectionResult<T>> {
    let lam = lambdas(ml)?;
    let mut rows = Vec::with_capacity(ml.entries.len());
    for (e, &l) in ml.entries.iter().zip(&lam) {
        let score = -T::of(2.0) * e.fit.loglik + criterion.penalty(e.size + 1, ml.n)?;
        rows.push(LambdaRow {
            size: e.size,
            model: e.model,
            loglik: e.fit.loglik,
            lambda: l,
            in_region: None,
            score: Some(score),
        });
    }
    let mut pick = 0;
    for (j, r) in rows.iter().enumerate() {
        if r.score < rows[pick].score {
            pick = j;
        }
    }
    let entry = &ml.entries[pick];
    Ok(SelectionResult {
        criterion: CriterionSpec::Ic(criterion),
        selected: entry.model,
        fit: entry.fit.clone(),
        lambda_by_size: rows,
        threshold: None,
        warnings: ml.warnings.clone(),
    })
}

pub fn select_from_ml_set<T: Real>(ml: &MlSet<T>, spec: CriterionSpec<T>) -> Result<SelectionResult<T>> {
    match spec {
        CriterionSpec::Cmc(mode) => cmc_from_ml_set(ml, mode),
        CriterionSpec::Ic(ic) => ic_from_ml_set(ml, ic),
    }
}

/// Constrained minimum criterion: the sparsest ML-set member with `λ <= T`.
pub fn cmc_select<T: Real>(data: &Dataset<T>, mode: AlphaMode<T>, budget: &SearchBudget) -> Result<SelectionResult<T>> {
    mode.validate()?;
    cmc_from_ml_set(&ml_set(data, budget)?, mode)
}

/// AIC, BIC or Hannan-Quinn over the ML set.
pub fn ic_select<T: Real>(data: &Dataset<T>, criterion: InfoCriterion, budget: &SearchBudget) -> Result<SelectionResult<T>> {
    if criterion == InfoCriterion::Hq {
        criterion.penalty::<T>(1, data.n())?;
    }
    ic_from_ml_set(&ml_set(data, budget)?, criterion)
}

/// One line of a criterion comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow<T> {
    pub criterion: String,
    pub selected: ModelId,
    pub variables: Vec<String>,
    pub size: usize,
    pub loglik: T,
    pub lambda: T,
    pub score: Option<T>,
    pub threshold: Option<T>,
    pub alpha_effective: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison<T> {
    pub rows: Vec<ComparisonRow<T>>,
    #[serde(skip)]
    pub results: Vec<SelectionResult<T>>,
    pub ml_set: MlSet<T>,
}

/// Runs several criteria against one shared ML set.
pub fn compare<T: Real>(data: &Dataset<T>, specs: &[CriterionSpec<T>], budget: &SearchBudget) -> Result<Comparison<T>> {
    if specs.is_empty() {
        return Err(Error::Usage("compare needs at least one criterion".into()));
    }
    let ml = ml_set(data, budget)?;
    let results = specs
        .iter()
        .map(|&s| select_from_ml_set(&ml, s))
        .collect::<Result<Vec<_>>>()?;
    let rows = results
        .iter()
        .map(|r| ComparisonRow {
            criterion: r.criterion.label(),
            selected: r.selected,
            variables: data.model_names(r.selected),
            size: r.size(),
            loglik: r.fit.loglik,
            lambda: r.lambda(),
            score: r.score(),
            threshold: r.threshold.map(|t| t.value),
            alpha_effective: r.threshold.map(|t| t.alpha_effective),
        })
        .collect();
    Ok(Comparison { rows, results, ml_set: ml })
}
