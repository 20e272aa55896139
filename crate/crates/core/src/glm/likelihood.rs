use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::scalar::Real;
use crate::stats::log_gamma;

use super::{Dataset, Family, FitResult};

/// Log-likelihood of a full-length coefficient vector.
///
/// The Gaussian case uses the variance-profiled likelihood
/// `-(n/2)[ln 2π + ln(RSS/n) + 1]`.
pub fn log_likelihood<T: Real>(data: &Dataset<T>, beta: &[T]) -> Result<T> {
    if beta.len() != data.p() + 1 {
        return Err(Error::Usage(format!(
            "coefficient vector has length {}, expected {}",
            beta.len(),
            data.p() + 1
        )));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Overflow("non-finite coefficient".into()));
    }
    let eta = data.design().mul_vec(beta);
    let ll = loglik_from_eta(data, &eta)?;
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::Overflow("log-likelihood is not finite".into()))
    }
}

pub(crate) fn loglik_from_eta<T: Real>(data: &Dataset<T>, eta: &[T]) -> Result<T> {
    if eta.iter().any(|e| !e.is_finite()) {
        return Err(Error::Overflow("non-finite linear predictor".into()));
    }
    let y = data.y();
    Ok(match data.family() {
        Family::Gaussian => {
            let rss = y.iter().zip(eta).fold(T::zero(), |a, (&yi, &e)| a + (yi - e) * (yi - e));
            if rss == T::zero() {
                return Err(Error::DegenerateFit { model: "coefficient vector".into() });
            }
            gaussian_profiled(data.n(), rss)
        }
        Family::Binomial => y.iter().zip(eta).fold(T::zero(), |a, (&yi, &e)| a + yi * e - softplus(e)),
        Family::Poisson => {
            let mut acc = T::zero();
            for (&yi, &e) in y.iter().zip(eta) {
                acc = acc + yi * e - e.exp() - log_gamma(yi + T::one())?;
            }
            acc
        }
    })
}

pub(crate) fn gaussian_profiled<T: Real>(n: usize, rss: T) -> T {
    let nf = T::of_usize(n);
    let ln_2pi = T::of(1.837_877_066_409_345_5);
    -(nf / T::of(2.0)) * (ln_2pi + (rss / nf).ln() + T::one())
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus<T: Real>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Wald statistic `(β - β̂)ᵀ XᵀX (β - β̂) / σ̂²` of a Gaussian full-model fit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct WaldStat<T>(T);

impl<T: Real> WaldStat<T> {
    pub fn value(self) -> T {
        self.0
    }
}

/// `σ̂²` is the full-model mean squared error `RSS / (n - p - 1)`.
pub fn wald_stat<T: Real>(data: &Dataset<T>, beta: &[T], full_fit: &FitResult<T>) -> Result<WaldStat<T>> {
    if data.family() != Family::Gaussian {
        return Err(Error::Usage("the Wald statistic is defined for the gaussian family".into()));
    }
    if full_fit.dataset_key != data.key() || full_fit.model != data.full_model() {
        return Err(Error::Usage("wald_stat needs the full-model fit of the same dataset".into()));
    }
    if beta.len() != data.p() + 1 {
        return Err(Error::Usage("coefficient vector has wrong length".into()));
    }
    let rss = full_fit.rss.ok_or_else(|| Error::Internal("gaussian fit without RSS".into()))?;
    let dof = T::of_usize(data.n() - data.p() - 1);
    let sigma2 = rss / dof;
    if !(sigma2 > T::zero()) {
        return Err(Error::DegenerateFit { model: full_fit.model.to_string() });
    }
    let diff: Vec<T> = beta.iter().zip(&full_fit.beta).map(|(&b, &h)| b - h).collect();
    let xd = norm2(&data.design().mul_vec(&diff));
    Ok(WaldStat(xd * xd / sigma2))
}
