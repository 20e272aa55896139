//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cmc::glm::Family;
use cmc::selection::InfoCriterion;
use cmc::sim::{gen_design, gen_response};
use cmc::{fit_submodel, Dataset, FitResult, ModelId, RngStream};

/// Random sparse problem: AR(1) design, roughly half the slopes non-zero.
pub fn random_problem(stream: &mut RngStream, family: Family, n: usize, p: usize) -> (Dataset, Vec<f64>) {
    let rho = 0.6 * (stream.uniform() - 0.5);
    let scale = match family {
        Family::Gaussian => 1.5,
        Family::Binomial => 0.8,
        Family::Poisson => 0.35,
    };
    let mut beta = vec![0.0; p + 1];
    beta[0] = match family {
        Family::Poisson => 0.5,
        _ => 0.3 * stream.standard_normal(),
    };
    for b in beta.iter_mut().skip(1) {
        if stream.uniform() < 0.5 {
            *b = scale * stream.standard_normal();
        }
    }
    let x = gen_design(n, p, rho, stream).unwrap();
    let y = gen_response(&x, &beta, family, 1.0, stream).unwrap().y;
    let names = std::iter::once("(Intercept)".to_string())
        .chain((1..=p).map(|i| format!("x{i}")))
        .collect();
    (Dataset::new(y, x, family, names).unwrap(), beta)
}

/// Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let m = b.len();
    for k in 0..m {
        let piv = (k..m).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..m {
            let f = a[i][k] / a[k][k];
            for j in k..m {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Rows of the design restricted to the model's columns.
pub fn model_rows(data: &Dataset, model: ModelId) -> Vec<Vec<f64>> {
    let cols = model.design_columns();
    let x = data.design();
    (0..data.n()).map(|i| cols.iter().map(|&c| x.get(i, c)).collect()).collect()
}

fn embed(p: usize, model: ModelId, coef: &[f64]) -> Vec<f64> {
    let mut beta = vec![0.0; p + 1];
    for (c, b) in model.design_columns().into_iter().zip(coef) {
        beta[c] = *b;
    }
    beta
}

/// Least squares through the normal equations.
pub fn ols_oracle(data: &Dataset, model: ModelId) -> (Vec<f64>, f64) {
    let rows = model_rows(data, model);
    let y = data.y();
    let m = rows[0].len();
    let mut xtx = vec![vec![0.0; m]; m];
    let mut xty = vec![0.0; m];
    for (r, &yi) in rows.iter().zip(y) {
        for a in 0..m {
            xty[a] += r[a] * yi;
            for b in 0..m {
                xtx[a][b] += r[a] * r[b];
            }
        }
    }
    let coef = solve(xtx, xty);
    let rss = rows
        .iter()
        .zip(y)
        .map(|(r, &yi)| {
            let e = yi - r.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>();
            e * e
        })
        .sum();
    (embed(data.p(), model, &coef), rss)
}

fn ln_factorial(k: f64) -> f64 {
    (2..=k as u64).map(|i| (i as f64).ln()).sum()
}

/// Log-likelihood from first principles.
pub fn loglik_oracle(data: &Dataset, beta: &[f64]) -> f64 {
    let x = data.design();
    let y = data.y();
    let n = data.n();
    let eta: Vec<f64> = (0..n)
        .map(|i| (0..beta.len()).map(|j| x.get(i, j) * beta[j]).sum())
        .collect();
    match data.family() {
        Family::Gaussian => {
            let rss: f64 = y.iter().zip(&eta).map(|(a, b)| (a - b).powi(2)).sum();
            let s2 = rss / n as f64;
            y.iter()
                .zip(&eta)
                .map(|(a, b)| -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - (a - b).powi(2) / (2.0 * s2))
                .sum()
        }
        Family::Binomial => y
            .iter()
            .zip(&eta)
            .map(|(&yi, &e)| {
                let p = 1.0 / (1.0 + (-e).exp());
                yi * p.ln() + (1.0 - yi) * (1.0 - p).ln()
            })
            .sum(),
        Family::Poisson => y
            .iter()
            .zip(&eta)
            .map(|(&yi, &e)| yi * e - e.exp() - ln_factorial(yi))
            .sum(),
    }
}

/// Gradient of the log-likelihood over the model's coefficients.
pub fn score_oracle(data: &Dataset, model: ModelId, beta: &[f64]) -> Vec<f64> {
    let rows = model_rows(data, model);
    let cols = model.design_columns();
    let coef: Vec<f64> = cols.iter().map(|&c| beta[c]).collect();
    let mut g = vec![0.0; cols.len()];
    for (r, &yi) in rows.iter().zip(data.y()) {
        let e: f64 = r.iter().zip(&coef).map(|(a, b)| a * b).sum();
        let mu = match data.family() {
            Family::Binomial => 1.0 / (1.0 + (-e).exp()),
            Family::Poisson => e.exp(),
            Family::Gaussian => e,
        };
        for k in 0..g.len() {
            g[k] += r[k] * (yi - mu);
        }
    }
    g
}

/// Newton-Raphson on the canonical-link log-likelihood with a dense Hessian.
pub fn newton_oracle(data: &Dataset, model: ModelId) -> Vec<f64> {
    let rows = model_rows(data, model);
    let y = data.y();
    let m = rows[0].len();
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let mut coef = vec![0.0; m];
    coef[0] = match data.family() {
        Family::Binomial => (ybar / (1.0 - ybar)).ln(),
        Family::Poisson => ybar.ln(),
        Family::Gaussian => ybar,
    };
    let ll = |c: &[f64]| loglik_oracle(data, &embed(data.p(), model, c));
    let mut current = ll(&coef);
    for _ in 0..200 {
        let mut g = vec![0.0; m];
        let mut h = vec![vec![0.0; m]; m];
        for (r, &yi) in rows.iter().zip(y) {
            let e: f64 = r.iter().zip(&coef).map(|(a, b)| a * b).sum();
            let (mu, w) = match data.family() {
                Family::Binomial => {
                    let p = 1.0 / (1.0 + (-e).exp());
                    (p, p * (1.0 - p))
                }
                _ => (e.exp(), e.exp()),
            };
            for a in 0..m {
                g[a] += r[a] * (yi - mu);
                for b in 0..m {
                    h[a][b] += w * r[a] * r[b];
                }
            }
        }
        let delta = solve(h, g);
        let mut t = 1.0;
        let mut next: Vec<f64>;
        loop {
            next = coef.iter().zip(&delta).map(|(c, d)| c + t * d).collect();
            let v = ll(&next);
            if v >= current - 1e-12 * current.abs() || t < 1e-6 {
                current = v;
                break;
            }
            t *= 0.5;
        }
        let step = delta.iter().map(|d| (t * d).abs()).fold(0.0, f64::max);
        coef = next;
        if step < 1e-13 {
            break;
        }
    }
    embed(data.p(), model, &coef)
}

/// Every submodel fit, keyed by model.
pub fn all_fits(data: &Dataset) -> BTreeMap<ModelId, FitResult> {
    (0..1u64 << data.p())
        .map(|mask| {
            let m = ModelId::from_mask(mask);
            (m, fit_submodel(data, m).unwrap())
        })
        .collect()
}

/// Best fit of each size; likelihood ties go to the lexicographically
/// smallest index list.
pub fn brute_ml_set(fits: &BTreeMap<ModelId, FitResult>, p: usize) -> Vec<ModelId> {
    (0..=p)
        .map(|j| {
            let mut best: Option<&FitResult> = None;
            for f in fits.values().filter(|f| f.model.size() == j) {
                best = match best {
                    None => Some(f),
                    Some(b) if f.loglik > b.loglik + 1e-10 => Some(f),
                    Some(b) if (f.loglik - b.loglik).abs() <= 1e-10 && f.model.indices() < b.model.indices() => Some(f),
                    keep => keep,
                };
            }
            best.unwrap().model
        })
        .collect()
}

/// Literal reading of the constrained criterion: among all submodels with
/// `λ <= threshold`, the fewest predictors, then the highest likelihood.
pub fn brute_cmc(fits: &BTreeMap<ModelId, FitResult>, full: ModelId, threshold: f64) -> ModelId {
    let full_ll = fits[&full].loglik;
    let mut inside: Vec<&FitResult> = fits
        .values()
        .filter(|f| -2.0 * (f.loglik - full_ll) <= threshold)
        .collect();
    let min_size = inside.iter().map(|f| f.model.size()).min().unwrap();
    inside.retain(|f| f.model.size() == min_size);
    let top = inside.iter().map(|f| f.loglik).fold(f64::NEG_INFINITY, f64::max);
    inside
        .iter()
        .filter(|f| f.loglik >= top - 1e-10)
        .map(|f| f.model)
        .min_by_key(|m| m.indices())
        .unwrap()
}

/// Minimum of `-2ℓ + pen(j + 1)` over all submodels.
pub fn brute_ic(fits: &BTreeMap<ModelId, FitResult>, n: usize, ic: InfoCriterion) -> ModelId {
    let pen = |m: usize| -> f64 {
        let m = m as f64;
        let nf = n as f64;
        match ic {
            InfoCriterion::Aic => 2.0 * m,
            InfoCriterion::Bic => m * nf.ln(),
            InfoCriterion::Hq => 2.0 * m * nf.ln().ln(),
        }
    };
    let scored: Vec<(f64, ModelId)> = fits
        .values()
        .map(|f| (-2.0 * f.loglik + pen(f.model.size() + 1), f.model))
        .collect();
    let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    scored
        .iter()
        .filter(|s| s.0 <= best + 1e-10)
        .map(|s| s.1)
        .min_by_key(|m| (m.size(), m.indices()))
        .unwrap()
}

/// `-2 ln(1 - q)`, the chi-square quantile with two degrees of freedom.
pub fn chi2_df2_quantile(q: f64) -> f64 {
    -2.0 * (-q).ln_1p()
}
