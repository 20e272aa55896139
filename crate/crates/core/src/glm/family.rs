use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Real;

/// Response distribution with its canonical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Normal errors, identity link, variance profiled out.
    Gaussian,
    /// 0/1 responses, logit link.
    Binomial,
    /// Counts, log link.
    Poisson,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
            Family::Poisson => "poisson",
        }
    }

    /// Inverse link `μ = g⁻¹(η)`.
    pub(crate) fn mean<T: Real>(self, eta: T) -> T {
        match self {
            Family::Gaussian => eta,
            Family::Binomial => {
                if eta >= T::zero() {
                    (T::one() + (-eta).exp()).recip()
                } else {
                    let e = eta.exp();
                    e / (T::one() + e)
                }
            }
            Family::Poisson => eta.exp(),
        }
    }

    /// Variance function `V(μ)`; equals `dμ/dη` for canonical links.
    pub(crate) fn variance<T: Real>(self, mu: T) -> T {
        match self {
            Family::Gaussian => T::one(),
            Family::Binomial => mu * (T::one() - mu),
            Family::Poisson => mu,
        }
    }

    /// Link applied to a response mean, used for the IRLS start.
    pub(crate) fn link_of_mean<T: Real>(self, mean: T) -> T {
        match self {
            Family::Gaussian => mean,
            Family::Binomial => {
                let m = mean.max(T::of(1e-6)).min(T::one() - T::of(1e-6));
                (m / (T::one() - m)).ln()
            }
            Family::Poisson => mean.max(T::of(1e-6)).ln(),
        }
    }

    /// Checks one response value; returns a reason on failure.
    pub(crate) fn check_response<T: Real>(self, y: T) -> Option<&'static str> {
        if !y.is_finite() {
            return Some("response must be finite");
        }
        match self {
            Family::Gaussian => None,
            Family::Binomial => {
                (y != T::zero() && y != T::one()).then_some("binomial response must be 0 or 1")
            }
            Family::Poisson => (y < T::zero() || y.fract() != T::zero())
                .then_some("poisson response must be a non-negative integer"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "binomial" | "logistic" => Ok(Family::Binomial),
            "poisson" => Ok(Family::Poisson),
            other => Err(Error::Usage(format!("unknown family '{other}'"))),
        }
    }
}
