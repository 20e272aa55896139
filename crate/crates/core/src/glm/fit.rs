use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, Matrix, Qr};
use crate::model::ModelId;
use crate::scalar::Real;

use super::likelihood::{gaussian_profiled, loglik_from_eta};
use super::{Dataset, Family, MAX_IRLS_ITER, MAX_STEP_HALVINGS, RANK_TOL, SCORE_TOL, SEPARATION_COEF};

/// Maximum-likelihood fit of one submodel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub model: ModelId,
    /// Full-length `(p + 1)` coefficients; excluded predictors are exactly zero.
    pub beta: Vec<T>,
    pub loglik: T,
    pub deviance: T,
    /// Residual sum of squares (Gaussian only).
    pub rss: Option<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the log-likelihood gradient over the included coordinates.
    pub score_norm: T,
    pub warning: Option<String>,
    #[serde(skip)]
    pub(crate) dataset_key: u64,
}

impl<T: Real> FitResult<T> {
    pub fn size(&self) -> usize {
        self.model.size()
    }

    pub fn dataset_key(&self) -> u64 {
        self.dataset_key
    }
}

/// Fits `model` (intercept plus the masked predictors) by maximum likelihood.
///
/// Gaussian: exact least squares through the orthogonal factor of `[X | y]`.
/// Binomial and Poisson: IRLS with step halving, stopped once the score norm
/// drops below `1e-9 max(1, |loglik|)` or after 50 iterations.
pub fn fit_submodel<T: Real>(data: &Dataset<T>, model: ModelId) -> Result<FitResult<T>> {
    if let Some(top) = model.highest_index() {
        if top >= data.p() {
            return Err(Error::Usage(format!("model {model} references predictors beyond p={}", data.p())));
        }
    }
    match data.family() {
        Family::Gaussian => fit_gaussian(data, model),
        Family::Binomial | Family::Poisson => fit_irls(data, model),
    }
}

fn embed<T: Real>(p: usize, cols: &[usize], coef: &[T]) -> Vec<T> {
    let mut beta = vec![T::zero(); p + 1];
    for (&c, &b) in cols.iter().zip(coef) {
        beta[c] = b;
    }
    beta
}

fn singular<T: Real>(data: &Dataset<T>, cols: &[usize], bad: &[usize]) -> Error {
    Error::SingularDesign {
        columns: bad.iter().map(|&k| data.column_names()[cols[k]].clone()).collect(),
    }
}

fn fit_gaussian<T: Real>(data: &Dataset<T>, model: ModelId) -> Result<FitResult<T>> {
    let reduced = data
        .reduced()
        .ok_or_else(|| Error::Internal("gaussian dataset without reduced factor".into()))?;
    let cols = model.design_columns();
    let y_col = data.p() + 1;
    let a = reduced.select_columns(&cols);
    let b = reduced.col(y_col).to_vec();
    let qr = Qr::new(a.clone());
    let bad = qr.deficient_columns(T::of(RANK_TOL));
    if !bad.is_empty() {
        return Err(singular(data, &cols, &bad));
    }
    let (coef, rss) = qr.solve_least_squares(&b);

    // ‖y‖² equals the squared norm of the last column of the reduced factor.
    let yty = dot(&b, &b);
    let floor = (T::of(64.0) * T::epsilon()).powi(2) * yty.max(T::min_positive_value());
    if !(rss > floor) {
        return Err(Error::DegenerateFit { model: model.to_string() });
    }

    // Xᵀ(y - Xβ) restricted to the model, evaluated in the reduced space.
    let fitted = a.mul_vec(&coef);
    let resid: Vec<T> = b.iter().zip(&fitted).map(|(&bi, &fi)| bi - fi).collect();
    let grad = a.tr_mul_vec(&resid);
    let n = data.n();
    let score_norm = norm2(&grad) * T::of_usize(n) / rss;

    Ok(FitResult {
        model,
        beta: embed(data.p(), &cols, &coef),
        loglik: gaussian_profiled(n, rss),
        deviance: rss,
        rss: Some(rss),
        iterations: 1,
        converged: true,
        score_norm,
        warning: None,
        dataset_key: data.key(),
    })
}

struct IrlsState<T> {
    coef: Vec<T>,
    eta: Vec<T>,
    loglik: T,
}

fn irls_state<T: Real>(data: &Dataset<T>, x: &Matrix<T>, coef: Vec<T>) -> Result<IrlsState<T>> {
    let eta = x.mul_vec(&coef);
    let loglik = loglik_from_eta(data, &eta)?;
    if !loglik.is_finite() {
        return Err(Error::Overflow("log-likelihood is not finite".into()));
    }
    Ok(IrlsState { coef, eta, loglik })
}

fn score<T: Real>(data: &Dataset<T>, x: &Matrix<T>, eta: &[T]) -> T {
    let family = data.family();
    let resid: Vec<T> = data.y().iter().zip(eta).map(|(&y, &e)| y - family.mean(e)).collect();
    norm2(&x.tr_mul_vec(&resid))
}

fn fit_irls<T: Real>(data: &Dataset<T>, model: ModelId) -> Result<FitResult<T>> {
    let family = data.family();
    let cols = model.design_columns();
    let x = data.design().select_columns(&cols);
    let n = data.n();
    let y = data.y();

    let mean = y.iter().copied().sum::<T>() / T::of_usize(n);
    let mut start = vec![T::zero(); cols.len()];
    start[0] = family.link_of_mean(mean);
    let mut state = irls_state(data, &x, start)?;

    let tol = |ll: T| T::tol(SCORE_TOL, 64.0) * ll.abs().max(T::one());
    let noise = |ll: T| T::of_usize(4 * n) * T::epsilon() * ll.abs().max(T::one());
    let mut score_norm = score(data, &x, &state.eta);
    let mut converged = score_norm <= tol(state.loglik);
    let mut iterations = 0;

    while !converged && iterations < MAX_IRLS_ITER {
        iterations += 1;
        let mu: Vec<T> = state.eta.iter().map(|&e| family.mean(e)).collect();
        let w: Vec<T> = mu.iter().map(|&m| family.variance(m).max(T::min_positive_value())).collect();
        let sw: Vec<T> = w.iter().map(|v| v.sqrt()).collect();
        let z: Vec<T> = (0..n)
            .map(|i| sw[i] * (state.eta[i] + (y[i] - mu[i]) / w[i]))
            .collect();
        let qr = Qr::new(x.scale_rows(&sw));
        let bad = qr.deficient_columns(T::of(RANK_TOL));
        if !bad.is_empty() {
            return Err(singular(data, &cols, &bad));
        }
        let (proposal, _) = qr.solve_least_squares(&z);

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            let trial: Vec<T> = state
                .coef
                .iter()
                .zip(&proposal)
                .map(|(&old, &new)| old + step * (new - old))
                .collect();
            if let Ok(next) = irls_state(data, &x, trial) {
                // Near the optimum the gain is below rounding noise in the
                // log-likelihood, so a flat step that shrinks the score counts.
                let flat = next.loglik >= state.loglik - noise(state.loglik);
                if next.loglik >= state.loglik {
                    accepted = Some(next);
                    break;
                }
                if flat {
                    let s = score(data, &x, &next.eta);
                    if s < score_norm {
                        accepted = Some(next);
                        break;
                    }
                }
            }
            step = step * T::of(0.5);
        }
        let Some(next) = accepted else {
            // No ascent along the Newton direction: at the attainable optimum.
            break;
        };
        state = next;
        score_norm = score(data, &x, &state.eta);
        converged = score_norm <= tol(state.loglik);
    }

    // Under separation the score can vanish numerically while the
    // coefficients keep diverging, so coefficient size decides.
    let largest = state.coef.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    let separated = family == Family::Binomial && largest > T::of(SEPARATION_COEF);
    if separated {
        converged = false;
    }
    let warning = if converged {
        None
    } else if separated {
        Some(format!("model {model}: IRLS did not converge, coefficients exceed {SEPARATION_COEF} (possible complete separation)"))
    } else {
        Some(format!("model {model}: IRLS did not converge in {iterations} iterations"))
    };

    let deviance = match family {
        Family::Binomial => -T::of(2.0) * state.loglik,
        _ => {
            let mut dev = T::zero();
            for (&yi, &e) in y.iter().zip(&state.eta) {
                let m = e.exp();
                let term = if yi > T::zero() { yi * (yi / m).ln() } else { T::zero() };
                dev = dev + term - (yi - m);
            }
            T::of(2.0) * dev
        }
    };

    Ok(FitResult {
        model,
        beta: embed(data.p(), &cols, &state.coef),
        loglik: state.loglik,
        deviance,
        rss: None,
        iterations,
        converged,
        score_norm,
        warning,
        dataset_key: data.key(),
    })
}
