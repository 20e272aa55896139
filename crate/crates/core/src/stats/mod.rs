//! Special functions, chi-square distribution and the seeded random stream
//! used throughout the crate.

mod chi2;
mod gamma;
mod probability;
mod rng;

pub use chi2::{chi2_cdf, chi2_ln_pdf, chi2_quantile, chi2_sf, ChiSquare};
pub use gamma::{log_gamma, reg_gamma_lower, reg_gamma_upper};
pub use probability::Probability;
pub use rng::RngStream;
