use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{fit_submodel, Family};
use crate::model::ModelId;
use crate::model_space::{ml_set, SearchBudget};
use crate::selection::{compare, lambda_of, select_from_ml_set, CriterionSpec};
use crate::sim::{emit_report, run_trials, ReportFormat, SimConfig, TrialMetrics};
use crate::{Dataset, FitResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Rendered artifact plus diagnostics for the error stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub artifact: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeRow {
    pub size: usize,
    pub variables: Vec<String>,
    pub loglik: f64,
    pub lambda: f64,
    pub in_region: Option<bool>,
    pub score: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectOutput {
    pub command: &'static str,
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub criterion: String,
    pub selected: Vec<String>,
    pub size: usize,
    pub coefficients: Vec<Coefficient>,
    pub loglik: f64,
    pub lambda: f64,
    pub threshold: Option<f64>,
    pub alpha_effective: Option<f64>,
    pub df: Option<u32>,
    pub table: Vec<SizeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlSetOutput {
    pub command: &'static str,
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub full_loglik: f64,
    pub table: Vec<SizeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutput {
    pub command: &'static str,
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub variables: Vec<String>,
    pub coefficients: Vec<Coefficient>,
    pub loglik: f64,
    pub deviance: f64,
    pub rss: Option<f64>,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub score_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub criterion: String,
    pub selected: Vec<String>,
    pub size: usize,
    pub loglik: f64,
    pub lambda: f64,
    pub score: Option<f64>,
    pub threshold: Option<f64>,
    pub alpha_effective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareOutput {
    pub command: &'static str,
    pub family: Family,
    pub n: usize,
    pub p: usize,
    pub rows: Vec<CompareRow>,
    pub table: Vec<SizeRow>,
}

fn coefficients(data: &Dataset, fit: &FitResult) -> Vec<Coefficient> {
    fit.model
        .design_columns()
        .into_iter()
        .map(|c| Coefficient {
            name: data.column_names()[c].clone(),
            estimate: fit.beta[c],
        })
        .collect()
}

fn fit_warnings(fits: &[&FitResult]) -> Vec<String> {
    fits.iter()
        .filter_map(|f| f.warning.as_ref().map(|w| format!("model {}: {w}", f.model)))
        .collect()
}

fn json<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Left-aligned text table with two-space gutters.
fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let text: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(text.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn tabulate(header: &[&str], rows: &[Vec<String>], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => csv_text(header, rows),
        _ => Ok(text_table(header, rows)),
    }
}

fn num(v: f64, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => format!("{v:.6}"),
        _ => v.to_string(),
    }
}

fn opt_num(v: Option<f64>, format: OutputFormat) -> String {
    v.map(|v| num(v, format)).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn vars(v: &[String]) -> String {
    v.join(" ")
}

const SIZE_HEADER: [&str; 7] = ["size", "variables", "loglik", "lambda", "in_region", "score", "converged"];

fn size_rows(table: &[SizeRow], format: OutputFormat) -> Vec<Vec<String>> {
    table
        .iter()
        .map(|r| {
            vec![
                r.size.to_string(),
                vars(&r.variables),
                num(r.loglik, format),
                num(r.lambda, format),
                opt_bool(r.in_region),
                opt_num(r.score, format),
                r.converged.to_string(),
            ]
        })
        .collect()
}

pub fn cmd_select(data: &Dataset, spec: CriterionSpec<f64>, budget: &SearchBudget, format: OutputFormat) -> Result<Output> {
    let ml = ml_set(data, budget)?;
    let result = select_from_ml_set(&ml, spec)?;
    let table = ml
        .entries
        .iter()
        .zip(&result.lambda_by_size)
        .map(|(e, r)| SizeRow {
            size: r.size,
            variables: data.model_names(r.model),
            loglik: r.loglik,
            lambda: r.lambda,
            in_region: r.in_region,
            score: r.score,
            converged: e.fit.converged,
        })
        .collect();
    let out = SelectOutput {
        command: "select",
        family: data.family(),
        n: data.n(),
        p: data.p(),
        criterion: spec.label(),
        selected: data.model_names(result.selected),
        size: result.size(),
        coefficients: coefficients(data, &result.fit),
        loglik: result.fit.loglik,
        lambda: result.lambda(),
        threshold: result.threshold.map(|t| t.value),
        alpha_effective: result.threshold.map(|t| t.alpha_effective),
        df: result.threshold.map(|t| t.df),
        table,
    };
    let mut warnings = ml.warnings.clone();
    warnings.extend(result.warnings.iter().cloned());
    warnings.extend(fit_warnings(&[&result.fit]));

    let artifact = match format {
        OutputFormat::Json => json(&out)?,
        OutputFormat::Csv => tabulate(&SIZE_HEADER, &size_rows(&out.table, format), format)?,
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "criterion: {}", out.criterion).unwrap();
            writeln!(s, "selected: {{{}}}", out.selected.join(", ")).unwrap();
            writeln!(s, "loglik: {:.6}  lambda: {:.6}", out.loglik, out.lambda).unwrap();
            if let (Some(t), Some(a), Some(df)) = (out.threshold, out.alpha_effective, out.df) {
                writeln!(s, "threshold: {t:.6}  alpha_effective: {a:.6e}  df: {df}").unwrap();
            }
            s.push('\n');
            let coef: Vec<Vec<String>> = out
                .coefficients
                .iter()
                .map(|c| vec![c.name.clone(), num(c.estimate, format)])
                .collect();
            s.push_str(&text_table(&["term", "estimate"], &coef));
            s.push('\n');
            s.push_str(&text_table(&SIZE_HEADER, &size_rows(&out.table, format)));
            s
        }
    };
    Ok(Output { artifact, warnings })
}

pub fn cmd_mlset(data: &Dataset, budget: &SearchBudget, format: OutputFormat) -> Result<Output> {
    let ml = ml_set(data, budget)?;
    let table = ml
        .entries
        .iter()
        .map(|e| {
            Ok(SizeRow {
                size: e.size,
                variables: data.model_names(e.model),
                loglik: e.fit.loglik,
                lambda: lambda_of(&e.fit, &ml.full_fit)?,
                in_region: None,
                score: None,
                converged: e.fit.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = MlSetOutput {
        command: "mlset",
        family: data.family(),
        n: data.n(),
        p: data.p(),
        full_loglik: ml.full_fit.loglik,
        table,
    };
    let fits: Vec<&FitResult> = ml.entries.iter().map(|e| &e.fit).collect();
    let mut warnings = ml.warnings.clone();
    warnings.extend(fit_warnings(&fits));
    let artifact = match format {
        OutputFormat::Json => json(&out)?,
        _ => tabulate(&SIZE_HEADER, &size_rows(&out.table, format), format)?,
    };
    Ok(Output { artifact, warnings })
}

/// Resolves predictor names to a model.
pub fn parse_model(data: &Dataset, names: &[String]) -> Result<ModelId> {
    let columns = data.column_names();
    let idx = names
        .iter()
        .map(|n| {
            columns[1..]
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::Usage(format!("unknown predictor '{n}' in --model")))
        })
        .collect::<Result<Vec<_>>>()?;
    ModelId::from_indices(&idx)
}

pub fn cmd_fit(data: &Dataset, model: ModelId, format: OutputFormat) -> Result<Output> {
    let fit = fit_submodel(data, model)?;
    let full = fit_submodel(data, data.full_model())?;
    let out = FitOutput {
        command: "fit",
        family: data.family(),
        n: data.n(),
        p: data.p(),
        variables: data.model_names(model),
        coefficients: coefficients(data, &fit),
        loglik: fit.loglik,
        deviance: fit.deviance,
        rss: fit.rss,
        lambda: lambda_of(&fit, &full)?,
        iterations: fit.iterations,
        converged: fit.converged,
        score_norm: fit.score_norm,
    };
    let warnings = fit_warnings(&[&fit, &full]);
    let artifact = match format {
        OutputFormat::Json => json(&out)?,
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = out
                .coefficients
                .iter()
                .map(|c| vec![c.name.clone(), num(c.estimate, format)])
                .collect();
            csv_text(&["term", "estimate"], &rows)?
        }
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "model: {{{}}}", out.variables.join(", ")).unwrap();
            writeln!(
                s,
                "loglik: {:.6}  deviance: {:.6}  lambda: {:.6}",
                out.loglik, out.deviance, out.lambda
            )
            .unwrap();
            writeln!(s, "iterations: {}  converged: {}", out.iterations, out.converged).unwrap();
            s.push('\n');
            let rows: Vec<Vec<String>> = out
                .coefficients
                .iter()
                .map(|c| vec![c.name.clone(), num(c.estimate, format)])
                .collect();
            s.push_str(&text_table(&["term", "estimate"], &rows));
            s
        }
    };
    Ok(Output { artifact, warnings })
}

pub fn cmd_compare(
    data: &Dataset,
    specs: &[CriterionSpec<f64>],
    budget: &SearchBudget,
    format: OutputFormat,
) -> Result<Output> {
    let cmp = compare(data, specs, budget)?;
    let rows: Vec<CompareRow> = cmp
        .rows
        .iter()
        .map(|r| CompareRow {
            criterion: r.criterion.clone(),
            selected: r.variables.clone(),
            size: r.size,
            loglik: r.loglik,
            lambda: r.lambda,
            score: r.score,
            threshold: r.threshold,
            alpha_effective: r.alpha_effective,
        })
        .collect();
    let table = cmp
        .ml_set
        .entries
        .iter()
        .map(|e| {
            Ok(SizeRow {
                size: e.size,
                variables: data.model_names(e.model),
                loglik: e.fit.loglik,
                lambda: lambda_of(&e.fit, &cmp.ml_set.full_fit)?,
                in_region: None,
                score: None,
                converged: e.fit.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = CompareOutput {
        command: "compare",
        family: data.family(),
        n: data.n(),
        p: data.p(),
        rows,
        table,
    };
    let mut warnings = cmp.ml_set.warnings.clone();
    for r in &cmp.results {
        warnings.extend(r.warnings.iter().cloned());
    }
    let artifact = match format {
        OutputFormat::Json => json(&out)?,
        _ => {
            let header = [
                "criterion",
                "selected",
                "size",
                "loglik",
                "lambda",
                "score",
                "threshold",
                "alpha_effective",
            ];
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.criterion.clone(),
                        vars(&r.selected),
                        r.size.to_string(),
                        num(r.loglik, format),
                        num(r.lambda, format),
                        opt_num(r.score, format),
                        opt_num(r.threshold, format),
                        opt_num(r.alpha_effective, format),
                    ]
                })
                .collect();
            tabulate(&header, &rows, format)?
        }
    };
    Ok(Output { artifact, warnings })
}

fn sim_warnings(m: &TrialMetrics) -> Vec<String> {
    let mut w = Vec::new();
    for s in &m.per_n {
        if s.failures > 0 {
            w.push(format!("n={}: {} replication(s) failed and were skipped", s.n, s.failures));
        }
        if s.nonconverged > 0 {
            w.push(format!("n={}: {} replication(s) had non-converged fits", s.n, s.nonconverged));
        }
        if s.clamp_events > 0 {
            w.push(format!("n={}: {} linear predictor value(s) clamped", s.n, s.clamp_events));
        }
    }
    w
}

pub fn cmd_simulate(config: &SimConfig, format: OutputFormat) -> Result<Output> {
    let metrics = run_trials(config)?;
    let artifact = match format {
        OutputFormat::Json | OutputFormat::Csv => {
            let fmt = if format == OutputFormat::Json {
                ReportFormat::Json
            } else {
                ReportFormat::Csv
            };
            let mut buf = Vec::new();
            emit_report(&metrics, fmt, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?
        }
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = metrics
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.criterion.clone(),
                        format!("{:.3}", r.exact_match_rate),
                        format!("{:.3}", r.false_active_rate),
                        format!("{:.3}", r.false_inactive_rate),
                        r.coverage_freq.map(|c| format!("{c:.3}")).unwrap_or_default(),
                        format!("{:.3}", r.capture_rate),
                        format!("{:.2}", r.mean_size),
                        r.failures.to_string(),
                    ]
                })
                .collect();
            text_table(
                &["n", "criterion", "exact", "false_act", "false_inact", "coverage", "capture", "size", "failures"],
                &rows,
            )
        }
    };
    Ok(Output {
        artifact,
        warnings: sim_warnings(&metrics),
    })
}
