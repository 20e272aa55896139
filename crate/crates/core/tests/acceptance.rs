//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use cmc::glm::Family;
use cmc::selection::cmc_from_ml_set;
use cmc::sim::{run_trials, run_trials_with, MetricRow, SimConfig, TrialMetrics};
use cmc::{
    chi2_cdf, chi2_quantile, cmc_select, fit_submodel, log_likelihood, make_threshold, ml_set, wald_stat, AlphaMode,
    ChiSquare, CriterionSpec, ModelId, Probability, RngStream, SearchBudget,
};
use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn special_functions() -> Outcome {
    let start = Instant::now();
    let two = ChiSquare::new(2).unwrap();
    let mut worst_closed = 0.0_f64;
    for k in 1..=99 {
        let q = k as f64 / 100.0;
        let x = chi2_quantile(Probability::new(q).unwrap(), two).unwrap();
        worst_closed = worst_closed.max((x - chi2_df2_quantile(q)).abs());
    }
    let mut worst_trip = 0.0_f64;
    for df in 1..=30 {
        let dist = ChiSquare::new(df).unwrap();
        for k in 1..=99 {
            let q = k as f64 / 100.0;
            let x = chi2_quantile(Probability::new(q).unwrap(), dist).unwrap();
            worst_trip = worst_trip.max((chi2_cdf(x, dist).unwrap().value() - q).abs());
        }
        for k in 1..=60 {
            let x = k as f64 * 1.5;
            let back = chi2_quantile(chi2_cdf(x, dist).unwrap(), dist).unwrap();
            worst_trip = worst_trip.max((back - x).abs() / x.max(1.0));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_closed <= 1e-10 && worst_trip <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("df=2 max error {worst_closed:.2e}, round-trip max error {worst_trip:.2e}, {elapsed:.2?}"),
    )
}

fn fit_correctness() -> Outcome {
    let start = Instant::now();
    let mut s = RngStream::substream(1001, 0);
    let mut worst_ols = 0.0_f64;
    for _ in 0..100 {
        let p = 1 + (s.uniform() * 8.0) as usize;
        let n = p + 12 + (s.uniform() * (188 - p) as f64) as usize;
        let (data, _) = random_problem(&mut s, Family::Gaussian, n, p);
        for mask in [0, (1u64 << p) - 1, (s.uniform() * (1u64 << p) as f64) as u64] {
            let m = ModelId::from_mask(mask);
            let fit = fit_submodel(&data, m).unwrap();
            let (beta, _) = ols_oracle(&data, m);
            for (a, b) in fit.beta.iter().zip(&beta) {
                worst_ols = worst_ols.max((a - b).abs() / b.abs().max(1.0));
            }
        }
    }

    let mut worst_glm = 0.0_f64;
    let mut worst_score = 0.0_f64;
    let mut unconverged = 0;
    let h = 1e-5;
    for family in [Family::Binomial, Family::Poisson] {
        for _ in 0..100 {
            let p = 1 + (s.uniform() * 8.0) as usize;
            let n = 100 + (s.uniform() * 100.0) as usize;
            let (data, _) = random_problem(&mut s, family, n, p);
            let m = data.full_model();
            let fit = fit_submodel(&data, m).unwrap();
            if !fit.converged {
                unconverged += 1;
                continue;
            }
            let oracle = newton_oracle(&data, m);
            for (a, b) in fit.beta.iter().zip(&oracle) {
                worst_glm = worst_glm.max((a - b).abs());
            }
            let mut fd = Vec::new();
            for c in m.design_columns() {
                let mut up = fit.beta.clone();
                let mut down = fit.beta.clone();
                up[c] += h;
                down[c] -= h;
                fd.push((log_likelihood(&data, &up).unwrap() - log_likelihood(&data, &down).unwrap()) / (2.0 * h));
            }
            let analytic = score_oracle(&data, m, &fit.beta);
            let norm = analytic.iter().map(|g| g * g).sum::<f64>().sqrt();
            let fd_norm = fd.iter().map(|g| g * g).sum::<f64>().sqrt();
            worst_score = worst_score.max(norm).max(fd_norm);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_ols <= 1e-8 && worst_glm <= 1e-6 && worst_score <= 1e-6 && unconverged == 0 && elapsed < Duration::from_secs(30),
        format!(
            "gaussian max error {worst_ols:.2e}, glm max error {worst_glm:.2e}, max score norm {worst_score:.2e}, \
             {unconverged} unconverged, {elapsed:.2?}"
        ),
    )
}

struct SearchReport {
    cmc: Outcome,
    ml: Outcome,
}

fn exhaustive_equivalence() -> SearchReport {
    let start = Instant::now();
    let mut s = RngStream::substream(1002, 0);
    let mut cmc_mismatch = 0;
    let mut ml_mismatch = 0;
    let mut monotone_violations = 0;
    let mut datasets = 0;
    let modes = [
        AlphaMode::Fixed(0.1),
        AlphaMode::Fixed(0.5),
        AlphaMode::Fixed(0.9),
        AlphaMode::Schedule(0.5),
    ];
    for family in [Family::Gaussian, Family::Binomial, Family::Poisson] {
        for k in 0..100 {
            let p = 1 + (s.uniform() * 10.0) as usize;
            let n = 100 + (s.uniform() * 100.0) as usize;
            let (data, _) = random_problem(&mut s, family, n, p);
            datasets += 1;
            let fits = all_fits(&data);
            let ml = ml_set(&data, &SearchBudget::default()).unwrap();
            let chosen: Vec<ModelId> = ml.entries.iter().map(|e| e.model).collect();
            if chosen != brute_ml_set(&fits, p) {
                ml_mismatch += 1;
            }
            monotone_violations += ml
                .entries
                .windows(2)
                .filter(|w| w[1].fit.loglik < w[0].fit.loglik - 1e-8)
                .count();

            let mode = modes[k % modes.len()];
            let t = make_threshold(mode, n, p).unwrap();
            let sel = cmc_select(&data, mode, &SearchBudget::default()).unwrap();
            if sel.selected != brute_cmc(&fits, data.full_model(), t.value) {
                cmc_mismatch += 1;
            }
            // Every other mode on the same ML set as well.
            for &other in &modes {
                let t = make_threshold(other, n, p).unwrap();
                if cmc_from_ml_set(&ml, other).unwrap().selected != brute_cmc(&fits, data.full_model(), t.value) {
                    cmc_mismatch += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    SearchReport {
        cmc: outcome(
            cmc_mismatch == 0 && elapsed < Duration::from_secs(300),
            format!("{cmc_mismatch} mismatches over {datasets} datasets x 5 selections, {elapsed:.2?}"),
        ),
        ml: outcome(
            ml_mismatch == 0 && monotone_violations == 0,
            format!("{ml_mismatch} mismatches, {monotone_violations} monotonicity violations over {datasets} datasets"),
        ),
    }
}

fn binomial_se(rate: f64, trials: usize) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

fn rows_for<'a>(m: &'a TrialMetrics, label: &str) -> Vec<&'a MetricRow> {
    m.rows.iter().filter(|r| r.criterion == label).collect()
}

struct DeskReport {
    consistency: Outcome,
    coverage: Outcome,
    capture: Outcome,
}

fn desk_scenario() -> DeskReport {
    let start = Instant::now();
    let mut cfg = SimConfig::desk(0.5);
    cfg.criteria = vec![CriterionSpec::Cmc(AlphaMode::Schedule(0.5))];
    let m = run_trials(&cfg).unwrap();
    let elapsed = start.elapsed();
    let rows = rows_for(&m, "cmc(gamma=0.5)");

    let exact: Vec<f64> = rows.iter().map(|r| r.exact_match_rate).collect();
    let se = |r: &MetricRow, v: f64| binomial_se(v, r.trials);
    let non_decreasing = rows
        .windows(2)
        .all(|w| w[1].exact_match_rate >= w[0].exact_match_rate - 2.0 * se(w[0], w[0].exact_match_rate).hypot(se(w[1], w[1].exact_match_rate)));
    let last = *exact.last().unwrap();
    let consistency = outcome(
        non_decreasing && last >= 0.95 && elapsed < Duration::from_secs(600),
        format!("exact match by n {:?}: {exact:?}, {elapsed:.2?}", cfg.n_grid),
    );

    let mut coverage_ok = true;
    let mut parts = Vec::new();
    for r in &rows {
        let cov = r.coverage_freq.unwrap();
        let at_truth = r.beta_true_coverage_freq.unwrap();
        let alpha = r.alpha_effective.unwrap();
        let floor = 1.0 - alpha - 2.0 * binomial_se(1.0 - alpha, r.trials);
        coverage_ok &= cov >= floor && cov >= at_truth;
        parts.push(format!("n={} cov={cov:.3} (β^t {at_truth:.3}, floor {floor:.3})", r.n));
    }
    coverage_ok &= rows
        .windows(2)
        .all(|w| {
            let a = w[0].coverage_freq.unwrap();
            let b = w[1].coverage_freq.unwrap();
            b >= a - 2.0 * binomial_se(a, w[0].trials).hypot(binomial_se(b, w[1].trials))
        });
    coverage_ok &= rows.last().unwrap().coverage_freq.unwrap() >= 0.99;
    let coverage = outcome(coverage_ok, parts.join("; "));

    let capture_rates: Vec<f64> = m.per_n.iter().map(|s| s.capture_rate).collect();
    let capture = outcome(
        *capture_rates.last().unwrap() >= 0.99,
        format!("capture by n: {capture_rates:?}"),
    );
    DeskReport {
        consistency,
        coverage,
        capture,
    }
}

fn lambda_wald() -> Outcome {
    let mut s = RngStream::substream(1003, 0);
    let cfg = SimConfig::desk(0.5);
    let x = cmc::sim::gen_design(2000, cfg.p, cfg.rho, &mut s).unwrap();
    let y = cmc::sim::gen_response(&x, &cfg.beta_true, Family::Gaussian, 1.0, &mut s).unwrap().y;
    let names = std::iter::once("(Intercept)".to_string())
        .chain((1..=cfg.p).map(|i| format!("x{i}")))
        .collect();
    let data = cmc::Dataset::new(y, x, Family::Gaussian, names).unwrap();
    let full = fit_submodel(&data, data.full_model()).unwrap();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    while checked < 50 {
        let d: Vec<f64> = (0..=cfg.p).map(|_| s.standard_normal()).collect();
        let unit: Vec<f64> = full.beta.iter().zip(&d).map(|(b, d)| b + 1e-3 * d).collect();
        let w_unit = wald_stat(&data, &unit, &full).unwrap().value();
        let target = 15.0 * s.uniform();
        let k = 1e-3 * (target / w_unit).sqrt();
        let beta: Vec<f64> = full.beta.iter().zip(&d).map(|(b, d)| b + k * d).collect();
        let w = wald_stat(&data, &beta, &full).unwrap().value();
        if w > 15.0 {
            continue;
        }
        let lam = -2.0 * (log_likelihood(&data, &beta).unwrap() - full.loglik);
        worst = worst.max((lam - w).abs() / w.max(1.0));
        checked += 1;
    }
    outcome(worst <= 0.05, format!("max |λ-W|/max(1,W) = {worst:.4} over {checked} draws"))
}

fn alpha_regimes() -> Outcome {
    let mut cfg = SimConfig::desk(0.5);
    cfg.n_grid = vec![200];
    cfg.criteria = vec![
        CriterionSpec::Cmc(AlphaMode::Fixed(0.1)),
        CriterionSpec::Cmc(AlphaMode::Fixed(0.5)),
        CriterionSpec::Cmc(AlphaMode::Fixed(0.9)),
        CriterionSpec::Ic(cmc::InfoCriterion::Aic),
        CriterionSpec::Ic(cmc::InfoCriterion::Bic),
    ];
    let m = run_trials(&cfg).unwrap();
    let cmc_rows: Vec<&MetricRow> = m.rows.iter().take(3).collect();
    let fa: Vec<f64> = cmc_rows.iter().map(|r| r.false_active_rate).collect();
    let fi: Vec<f64> = cmc_rows.iter().map(|r| r.false_inactive_rate).collect();
    let ordered = fa.windows(2).all(|w| w[0] <= w[1]) && fi.windows(2).all(|w| w[0] >= w[1]);
    let agree = |a: &str, b: &str| {
        m.per_n[0]
            .agreement
            .iter()
            .find(|g| g.first == a && g.second == b)
            .map(|g| g.rate)
            .unwrap_or(f64::NAN)
    };
    outcome(
        ordered,
        format!(
            "false active {fa:?}, false inactive {fi:?}; agreement cmc(0.9)~aic {:.3}, cmc(0.1)~bic {:.3}",
            agree("cmc(alpha=0.9)", "aic"),
            agree("cmc(alpha=0.1)", "bic")
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SimConfig::desk(0.5);
    cfg.n_grid = vec![60, 240];
    cfg.replications = 40;
    let path = dir.path().join("sim.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/gaussian.csv");
    let invocations: Vec<Vec<String>> = vec![
        vec!["simulate".into(), "--config".into(), path.display().to_string(), "--seed".into(), "7".into()],
        vec!["simulate".into(), "--config".into(), path.display().to_string(), "--format".into(), "csv".into()],
        vec!["compare".into(), "--input".into(), data.display().to_string(), "--response".into(), "y".into()],
    ];
    let mut identical = true;
    for args in &invocations {
        let runs: Vec<Vec<u8>> = ["1", "4"]
            .iter()
            .flat_map(|threads| {
                (0..2).map(move |_| {
                    Command::new(env!("CARGO_BIN_EXE_cmc"))
                        .args(args)
                        .env("CMC_THREADS", threads)
                        .output()
                        .unwrap()
                        .stdout
                })
            })
            .collect();
        identical &= !runs[0].is_empty() && runs.iter().all(|r| r == &runs[0]);
    }

    let mut binom = cfg.clone();
    binom.family = Family::Binomial;
    binom.beta_true = vec![0.2, 1.0, -0.8, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0];
    let same = [cfg, binom]
        .iter()
        .all(|c| run_trials_with(c, true).unwrap() == run_trials_with(c, false).unwrap());
    outcome(
        identical && same,
        format!("CLI runs byte-identical: {identical}; serial == parallel: {same}"),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("1 special functions", special_functions()));
    results.push(("2 fit correctness", fit_correctness()));
    let search = exhaustive_equivalence();
    results.push(("3 cmc brute-force equivalence", search.cmc));
    results.push(("4 ml-set equivalence and monotonicity", search.ml));
    let desk = desk_scenario();
    results.push(("5 consistency curve", desk.consistency));
    results.push(("6 region coverage", desk.coverage));
    results.push(("7 active-variable capture", desk.capture));
    results.push(("8 likelihood ratio vs wald", lambda_wald()));
    results.push(("9 alpha regimes", alpha_regimes()));
    results.push(("10 determinism", determinism()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
