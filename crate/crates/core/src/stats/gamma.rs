use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Probability;

/// Stirling series coefficients B_{2k} / (2k (2k - 1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Arguments below this are shifted upward by recurrence before the
/// asymptotic series is applied.
const STIRLING_MIN: f64 = 10.0;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    let min = T::of(STIRLING_MIN);
    let mut z = x;
    let mut shift = T::one();
    while z < min {
        shift = shift * z;
        z = z + T::one();
    }
    Ok(stirling(z) - shift.ln())
}

fn stirling<T: Real>(z: T) -> T {
    let half = T::of(0.5);
    let ln_sqrt_2pi = T::of(0.918_938_533_204_672_8);
    let inv = z.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for &c in STIRLING.iter() {
        series = series + T::of(c) * pow;
        pow = pow * inv2;
    }
    (z - half) * z.ln() - z + ln_sqrt_2pi + series
}

/// Regularized lower incomplete gamma `P(a, x)`, returned with its
/// complement `Q(a, x)` computed without cancellation.
pub fn reg_gamma_lower<T: Real>(a: T, x: T) -> Result<Probability<T>> {
    let (p, q) = gamma_tails(a, x)?;
    Ok(Probability::from_tails(p, q))
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn reg_gamma_upper<T: Real>(a: T, x: T) -> Result<T> {
    Ok(gamma_tails(a, x)?.1)
}

/// Series for `x < a + 1`, Lentz continued fraction otherwise.
pub(crate) fn gamma_tails<T: Real>(a: T, x: T) -> Result<(T, T)> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::Domain(format!("incomplete gamma requires a > 0, got {a}")));
    }
    if !(x >= T::zero()) {
        return Err(Error::Domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    if x == T::zero() {
        return Ok((T::zero(), T::one()));
    }
    if x.is_infinite() {
        return Ok((T::one(), T::zero()));
    }
    let ln_prefactor = a * x.ln() - x - log_gamma(a)?;
    let max_iter = 500 + 20 * a.sqrt().to_usize().unwrap_or(0);
    if x < a + T::one() {
        let s = lower_series(a, x, max_iter)?;
        let p = (ln_prefactor + s.ln()).exp();
        Ok((p, T::one() - p))
    } else {
        let cf = upper_fraction(a, x, max_iter)?;
        let q = (ln_prefactor + cf.ln()).exp();
        Ok((T::one() - q, q))
    }
}

/// `Σ x^k / (a (a+1) ... (a+k))`.
fn lower_series<T: Real>(a: T, x: T, max_iter: usize) -> Result<T> {
    let eps = T::epsilon();
    let mut ap = a;
    let mut term = a.recip();
    let mut sum = term;
    for _ in 0..max_iter {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() <= sum.abs() * eps {
            return Ok(sum);
        }
    }
    Err(Error::Internal(format!(
        "incomplete gamma series did not converge (a={a}, x={x})"
    )))
}

/// Continued fraction `Q(a, x) / (x^a e^-x / Γ(a))`, evaluated with the
/// modified Lentz method.
fn upper_fraction<T: Real>(a: T, x: T, max_iter: usize) -> Result<T> {
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let one = T::one();
    let two = T::of(2.0);

    let mut b = x + one - a;
    let mut c = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..max_iter {
        let fi = T::of_usize(i);
        let an = -fi * (fi - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= eps {
            return Ok(h);
        }
    }
    Err(Error::Internal(format!(
        "incomplete gamma continued fraction did not converge (a={a}, x={x})"
    )))
}
