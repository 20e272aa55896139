//! Sparse maximum-likelihood model selection for linear and generalized
//! linear regression.
//!
//! The crate fits every submodel of a full regression model by maximum
//! likelihood, builds the per-size maximum likelihood set and selects the
//! sparsest member whose MLE lies inside a likelihood-ratio confidence
//! region of the full model (the constrained minimum criterion, CMC).
//! AIC, BIC and Hannan-Quinn run over the same set for comparison, and a
//! seeded Monte-Carlo harness measures selection accuracy on synthetic data.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the simulation harness and
//! the command-line tool use.

pub mod cli;
pub mod error;
pub mod glm;
pub mod linalg;
pub mod model;
pub mod model_space;
pub mod scalar;
pub mod selection;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use glm::{fit_submodel, log_likelihood, wald_stat, Family};
pub use model::ModelId;
pub use model_space::{best_of_size, ml_set, models_of_size, SearchBudget};
pub use scalar::Real;
pub use selection::{
    cmc_select, compare, ic_select, lambda_of, make_threshold, AlphaMode, CriterionSpec, InfoCriterion,
};
pub use stats::{chi2_cdf, chi2_quantile, ChiSquare, Probability, RngStream};

pub type Dataset = glm::Dataset<f64>;
pub type Dataset32 = glm::Dataset<f32>;
pub type FitResult = glm::FitResult<f64>;
pub type FitResult32 = glm::FitResult<f32>;
pub type MlSet = model_space::MlSet<f64>;
pub type MlSet32 = model_space::MlSet<f32>;
pub type SelectionResult = selection::SelectionResult<f64>;
pub type SelectionResult32 = selection::SelectionResult<f32>;
pub type Threshold = selection::Threshold<f64>;
pub type Matrix = linalg::Matrix<f64>;
