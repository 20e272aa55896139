use crate::error::{Error, Result};
use crate::scalar::Real;

use super::gamma::{gamma_tails, log_gamma};
use super::Probability;

/// Chi-square distribution with `df` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiSquare {
    df: u32,
}

impl ChiSquare {
    pub fn new(df: u32) -> Result<Self> {
        if df == 0 {
            return Err(Error::Domain("chi-square requires df >= 1".into()));
        }
        Ok(Self { df })
    }

    pub fn df(&self) -> u32 {
        self.df
    }

    fn shape<T: Real>(&self) -> T {
        T::of(f64::from(self.df) * 0.5)
    }
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if x >= T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("chi-square argument must be >= 0, got {x}")))
    }
}

/// `P(χ²_df <= x)`, with the upper tail carried alongside.
pub fn chi2_cdf<T: Real>(x: T, dist: ChiSquare) -> Result<Probability<T>> {
    check_x(x)?;
    let (p, q) = gamma_tails(dist.shape(), x * T::of(0.5))?;
    Ok(Probability::from_tails(p, q))
}

/// `P(χ²_df > x)`.
pub fn chi2_sf<T: Real>(x: T, dist: ChiSquare) -> Result<T> {
    Ok(chi2_cdf(x, dist)?.complement())
}

/// Log density of the chi-square distribution.
pub fn chi2_ln_pdf<T: Real>(x: T, dist: ChiSquare) -> Result<T> {
    check_x(x)?;
    let a: T = dist.shape();
    if x == T::zero() {
        return Ok(match dist.df {
            1 => T::infinity(),
            2 => -T::of(2.0).ln(),
            _ => T::neg_infinity(),
        });
    }
    Ok((a - T::one()) * x.ln() - x * T::of(0.5) - a * T::of(2.0).ln() - log_gamma(a)?)
}

/// Inverse of [`chi2_cdf`]: the `x` with `P(χ²_df <= x) = q`.
///
/// Newton iteration on the log of the smaller tail, safeguarded by a
/// bisection bracket that starts at `[0, df + 20 sqrt(2 df) + 200]`.
pub fn chi2_quantile<T: Real>(q: Probability<T>, dist: ChiSquare) -> Result<T> {
    if q.value() == T::zero() {
        return Ok(T::zero());
    }
    if q.complement() == T::zero() {
        return Err(Error::Domain("chi-square quantile requires q < 1".into()));
    }
    let use_lower = q.value() <= q.complement();
    let ln_target = if use_lower { q.value().ln() } else { q.complement().ln() };

    // Increasing in x with a root at the quantile; returns (f, f').
    let eval = |x: T| -> Result<(T, T)> {
        let cdf = chi2_cdf(x, dist)?;
        let ln_pdf = chi2_ln_pdf(x, dist)?;
        Ok(if use_lower {
            let ln_tail = cdf.value().ln();
            (ln_tail - ln_target, (ln_pdf - ln_tail).exp())
        } else {
            let ln_tail = cdf.complement().ln();
            (ln_target - ln_tail, (ln_pdf - ln_tail).exp())
        })
    };

    let df = T::of(f64::from(dist.df));
    let mut lo = T::zero();
    let mut hi = df + T::of(20.0) * (T::of(2.0) * df).sqrt() + T::of(200.0);
    // Extreme upper tails can sit beyond the initial bracket.
    let mut expansions = 0;
    while eval(hi)?.0 < T::zero() {
        lo = hi;
        hi = hi + hi;
        expansions += 1;
        if expansions > 64 {
            return Err(Error::Internal("chi-square quantile bracket expansion failed".into()));
        }
    }

    let eps = T::epsilon();
    let mut x = df.max(lo).min(hi);
    let (mut f, mut df_dx) = eval(x)?;
    for _ in 0..400 {
        if f == T::zero() {
            return Ok(x);
        }
        if f < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df_dx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            T::of(0.5) * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        let (nf, nd) = eval(x)?;
        f = nf;
        df_dx = nd;
        if step <= T::of(4.0) * eps * x || hi - lo <= T::of(4.0) * eps * x.max(T::min_positive_value()) {
            return Ok(x);
        }
    }
    Ok(x)
}
