//! File formats: dataset CSV (`y,x1..xp`), dataset metadata sidecar,
//! residual series, and the results table consumed by `plot`.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use whitelasso_core::datagen::{DgpConfig, InitMode, SimulatedDataset};

use crate::errors::{runtime, validation, CliResult};

/// Write a dataset as CSV with header `y,x1..xp`.
pub fn write_dataset_csv(path: &Path, data: &SimulatedDataset) -> CliResult<()> {
    let (n, p) = data.x.dim();
    let mut out = String::from("y");
    for j in 1..=p {
        out.push_str(&format!(",x{j}"));
    }
    out.push('\n');
    for t in 0..n {
        out.push_str(&format!("{}", data.y[t]));
        for j in 0..p {
            out.push_str(&format!(",{}", data.x[(t, j)]));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

/// Metadata sidecar: the generating configuration plus the true
/// coefficients. Support indices are 1-based, matching the `x<j>` column
/// names.
pub fn write_meta_toml(
    path: &Path,
    config: &DgpConfig,
    data: &SimulatedDataset,
) -> CliResult<()> {
    let mut out = String::from("[dgp]\n");
    out.push_str(&format!("n = {}\n", config.n));
    out.push_str(&format!("p = {}\n", config.p));
    out.push_str(&format!("s = {}\n", config.s));
    out.push_str(&format!("rho = {}\n", config.rho));
    out.push_str(&format!("sigma_u = {}\n", config.sigma_u));
    match config.init_mode {
        InitMode::Stationary => out.push_str("init = \"stationary\"\n"),
        InitMode::FixedVariance(v1) => {
            out.push_str("init = \"fixed\"\n");
            out.push_str(&format!("init_variance = {v1}\n"));
        }
    }
    out.push_str(&format!("beta_magnitude = {}\n", config.beta_magnitude));
    out.push_str(&format!("seed = {}\n", config.seed));
    out.push_str("\n[truth]\n");
    let support: Vec<String> = data.support.iter().map(|j| (j + 1).to_string()).collect();
    out.push_str(&format!("support = [{}]\n", support.join(", ")));
    let beta: Vec<String> = data.beta0.iter().map(|v| v.to_string()).collect();
    out.push_str(&format!("beta0 = [{}]\n", beta.join(", ")));
    fs::write(path, out).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

/// Read a dataset CSV written by `simulate` (or anything with the same
/// header shape).
pub fn read_dataset_csv(path: &Path) -> CliResult<(Array2<f64>, Array1<f64>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| validation(format!("{}: {e}", path.display())))?
        .clone();
    if headers.is_empty() || &headers[0] != "y" {
        return Err(validation(format!(
            "{}: expected a dataset CSV with first column `y`",
            path.display()
        )));
    }
    let p = headers.len() - 1;
    if p == 0 {
        return Err(validation(format!("{}: no predictor columns", path.display())));
    }
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| validation(format!("{}: {e}", path.display())))?;
        if record.len() != p + 1 {
            return Err(validation(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                idx + 2,
                record.len(),
                p + 1
            )));
        }
        let parse = |field: &str| -> CliResult<f64> {
            field.trim().parse::<f64>().map_err(|_| {
                validation(format!(
                    "{}: row {}: cannot parse `{field}` as a number",
                    path.display(),
                    idx + 2
                ))
            })
        };
        y.push(parse(&record[0])?);
        for j in 0..p {
            rows.push(parse(&record[j + 1])?);
        }
    }
    let n = y.len();
    if n == 0 {
        return Err(validation(format!("{}: no data rows", path.display())));
    }
    let x = Array2::from_shape_vec((n, p), rows).expect("shape checked above");
    Ok((x, Array1::from_vec(y)))
}

/// Read a residual series: one value per line, or a single-column CSV whose
/// first line may be a header.
pub fn read_series(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim().trim_end_matches(',');
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.contains(',') {
            return Err(validation(format!(
                "{}: line {}: expected a single column",
                path.display(),
                idx + 1
            )));
        }
        match trimmed.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if idx == 0 => continue, // header line
            Err(_) => {
                return Err(validation(format!(
                    "{}: line {}: cannot parse `{trimmed}` as a number",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(validation(format!("{}: no values found", path.display())));
    }
    Ok(values)
}

/// A results CSV held as strings (for faithful panel labels) with header
/// lookup.
pub struct ResultsTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultsTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| validation(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| validation(format!("{}: {e}", path.display())))?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        Ok(Self { headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Indices for the named columns, or the list of the missing ones.
    pub fn require_columns(&self, names: &[&str]) -> Result<Vec<usize>, Vec<String>> {
        let mut indices = Vec::new();
        let mut missing = Vec::new();
        for name in names {
            match self.column_index(name) {
                Some(i) => indices.push(i),
                None => missing.push(name.to_string()),
            }
        }
        if missing.is_empty() {
            Ok(indices)
        } else {
            Err(missing)
        }
    }
}
