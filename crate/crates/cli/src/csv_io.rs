//! CSV datasets: header row, comma delimiter, `.` decimal point.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use vbcomp_core::Dataset;

use crate::error::{CliError, Result};

/// Column name given to the prepended column of ones.
pub const INTERCEPT: &str = "(intercept)";

/// Reads `response` and `features` from a CSV file. An empty feature list
/// selects every column except the response. With `intercept`, a column of
/// ones is prepended to the design.
pub fn load_csv(path: &Path, response: &str, features: &[String], intercept: bool) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_owned()))
    };
    let y_col = find(response)?;
    let names: Vec<String> = if features.is_empty() {
        headers.iter().filter(|h| *h != response).cloned().collect()
    } else {
        features.to_vec()
    };
    let x_cols = names.iter().map(|f| find(f)).collect::<Result<Vec<_>>>()?;

    let mut y = Vec::new();
    let mut x = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let cell = |col: usize| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>().map_err(|_| CliError::NotNumeric {
                row: i + 1,
                column: headers[col].clone(),
                value: raw.to_owned(),
            })
        };
        y.push(cell(y_col)?);
        if intercept {
            x.push(1.0);
        }
        for &c in &x_cols {
            x.push(cell(c)?);
        }
    }
    if y.is_empty() {
        return Err(CliError::EmptyFile(path.to_path_buf()));
    }
    let n = y.len();
    let mut col_names = Vec::with_capacity(names.len() + 1);
    if intercept {
        col_names.push(INTERCEPT.to_owned());
    }
    col_names.extend(names);
    let p = col_names.len();
    let design = DMatrix::from_row_slice(n, p, &x);
    Ok(Dataset::new(DVector::from_vec(y), design, col_names)?)
}

/// Writes `response` followed by the design columns, 17 significant digits.
pub fn write_dataset<W: Write>(out: W, data: &Dataset, response: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| CliError::Usage(e.to_string());
    let mut header = vec![response.to_owned()];
    header.extend(data.names().iter().cloned());
    w.write_record(&header).map_err(to_err)?;
    for i in 0..data.n() {
        let mut row = vec![format!("{:.16e}", data.y()[i])];
        row.extend((0..data.p()).map(|j| format!("{:.16e}", data.x()[(i, j)])));
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}
