//! Maximum-likelihood fitting of submodels for the Gaussian (identity),
//! binomial (logit) and Poisson (log) families.

mod dataset;
mod family;
mod fit;
mod likelihood;

pub use dataset::Dataset;
pub use family::Family;
pub use fit::{fit_submodel, FitResult};
pub use likelihood::{log_likelihood, wald_stat, WaldStat};

/// Maximum number of IRLS iterations.
pub const MAX_IRLS_ITER: usize = 50;
/// Maximum step halvings per IRLS iteration.
pub const MAX_STEP_HALVINGS: usize = 10;
/// IRLS stops once `‖score‖ <= SCORE_TOL * max(1, |loglik|)`.
pub const SCORE_TOL: f64 = 1e-9;
/// Relative cut on the diagonal of `R` below which a column counts as dependent.
pub const RANK_TOL: f64 = 1e-10;
/// Coefficient magnitude that, without convergence, signals separation.
pub const SEPARATION_COEF: f64 = 30.0;
