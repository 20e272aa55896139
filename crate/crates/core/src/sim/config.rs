use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::Family;
use crate::model::ModelId;
use crate::model_space::EXHAUSTIVE_LIMIT;
use crate::selection::CriterionSpec;

/// Simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub family: Family,
    pub n_grid: Vec<usize>,
    pub p: usize,
    /// True coefficients `(β₀, β₁, …, β_p)`; non-zero slopes form the support.
    pub beta_true: Vec<f64>,
    /// AR(1) correlation between neighbouring predictors.
    pub rho: f64,
    /// Gaussian noise standard deviation; ignored for other families.
    #[serde(default = "unit")]
    pub sigma: f64,
    pub replications: usize,
    pub seed: u64,
    pub criteria: Vec<CriterionSpec<f64>>,
    /// Cap on the searched model size.
    #[serde(default)]
    pub max_size: Option<usize>,
}

fn unit() -> f64 {
    1.0
}

impl SimConfig {
    /// Gaussian scenario with `p = 8`, `β = (1, 1.5, -1.2, 0.8, 0, …, 0)`,
    /// `σ = 1`, 500 replications over `n ∈ {100, 400, 1600, 6400}`.
    pub fn desk(rho: f64) -> Self {
        Self {
            family: Family::Gaussian,
            n_grid: vec![100, 400, 1600, 6400],
            p: 8,
            beta_true: vec![1.0, 1.5, -1.2, 0.8, 0.0, 0.0, 0.0, 0.0, 0.0],
            rho,
            sigma: 1.0,
            replications: 500,
            seed: 20_240_917,
            criteria: CriterionSpec::default_set(),
            max_size: None,
        }
    }

    /// The true model: predictors with non-zero coefficients.
    pub fn support(&self) -> ModelId {
        let idx: Vec<usize> = self.beta_true[1..]
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(i, _)| i)
            .collect();
        ModelId::from_indices(&idx).expect("p validated")
    }

    /// Number of active predictors.
    pub fn p_active(&self) -> usize {
        self.support().size()
    }

    /// Smallest non-zero slope in absolute value.
    pub fn smallest_signal(&self) -> Option<f64> {
        self.beta_true[1..]
            .iter()
            .filter(|b| **b != 0.0)
            .map(|b| b.abs())
            .fold(None, |m: Option<f64>, b| Some(m.map_or(b, |m| m.min(b))))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.p > EXHAUSTIVE_LIMIT {
            return bad(format!("p={} exceeds the exhaustive search limit {EXHAUSTIVE_LIMIT}", self.p));
        }
        if self.beta_true.len() != self.p + 1 {
            return bad(format!("beta_true needs p + 1 = {} entries", self.p + 1));
        }
        if self.beta_true.iter().any(|b| !b.is_finite()) {
            return bad("beta_true must be finite".into());
        }
        if !(self.rho.abs() < 1.0) {
            return bad(format!("|rho| must be < 1, got {}", self.rho));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return bad(format!("sigma must be >= 0, got {}", self.sigma));
        }
        if self.replications == 0 {
            return bad("replications must be positive".into());
        }
        if self.criteria.is_empty() {
            return bad("at least one criterion is required".into());
        }
        for c in &self.criteria {
            if let CriterionSpec::Cmc(m) = c {
                m.validate()?;
            }
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n <= self.p + 1) {
            return bad(format!("sample size {n} must exceed p + 1 = {}", self.p + 1));
        }
        if let Some(k) = self.max_size {
            if k > self.p {
                return bad(format!("max_size {k} exceeds p={}", self.p));
            }
        }
        Ok(())
    }
}
