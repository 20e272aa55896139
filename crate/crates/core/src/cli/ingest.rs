use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::glm::Family;
use crate::Dataset;

/// Reads a headed, all-numeric CSV file into a dataset.
///
/// `predictors` defaults to every column other than the response, in file
/// order. The intercept is prepended.
pub fn ingest_csv(path: &Path, response: &str, predictors: Option<&[String]>, family: Family) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_bytes(&bytes, response, predictors, family)
}

/// Same as [`ingest_csv`] on in-memory CSV text.
pub fn ingest_bytes(bytes: &[u8], response: &str, predictors: Option<&[String]>, family: Family) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Validation(format!("unreadable header: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Usage(format!("column '{name}' not found in header")))
    };

    let y_col = find(response)?;
    let x_names: Vec<String> = match predictors {
        Some(list) => {
            let mut seen = HashSet::new();
            for name in list {
                if name == response {
                    return Err(Error::Usage(format!("'{name}' is the response and cannot be a predictor")));
                }
                if !seen.insert(name) {
                    return Err(Error::Usage(format!("predictor '{name}' listed twice")));
                }
            }
            list.to_vec()
        }
        None => header.iter().filter(|h| *h != response).cloned().collect(),
    };
    let x_cols = x_names.iter().map(|n| find(n)).collect::<Result<Vec<_>>>()?;

    let mut y = Vec::new();
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); x_cols.len()];
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::Validation(format!("row {row}: {e}")))?;
        let cell = |c: usize| -> Result<f64> {
            let raw = record.get(c).unwrap_or("").trim();
            if raw.is_empty() {
                return Err(Error::Validation(format!("row {row}, column {}: missing value", header[c])));
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Validation(format!(
                    "row {row}, column {}: non-numeric value '{raw}'",
                    header[c]
                ))),
            }
        };
        y.push(cell(y_col)?);
        for (k, &c) in x_cols.iter().enumerate() {
            xs[k].push(cell(c)?);
        }
    }

    for (k, col) in xs.iter().enumerate() {
        if col.windows(2).all(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("predictor '{}' is constant", x_names[k])));
        }
    }
    Dataset::from_predictors(y, &xs, &x_names, family)
}
