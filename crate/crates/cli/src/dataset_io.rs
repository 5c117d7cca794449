//! CSV datasets with header `x1,...,xm,y`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use ridge_sdr::Dataset;

use crate::error::{CliError, CliResult};

pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset(file).map_err(|e| match e {
        CliError::Io { message, .. } => CliError::io(path, message),
        other => other,
    })
}

/// Parses a dataset; rows are numbered from 1 after the header.
pub fn parse_dataset(reader: impl Read) -> CliResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::io("<input>", e))?
        .iter()
        .map(str::to_string)
        .collect();
    let width = header.len();
    if header.last().map(String::as_str) != Some("y") {
        return Err(CliError::MissingResponse);
    }
    let m = width - 1;
    if m == 0 || header[..m].iter().enumerate().any(|(j, h)| *h != format!("x{}", j + 1)) {
        return Err(CliError::BadHeader(header.join(",")));
    }

    let mut values = Vec::new();
    let mut y = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::io("<input>", e))?;
        if record.len() != width {
            return Err(CliError::RaggedRow {
                row,
                expected: width,
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| CliError::NonNumeric {
                row,
                column: header[j].clone(),
                value: cell.to_string(),
            })?;
            if j < m {
                values.push(v);
            } else {
                y.push(v);
            }
        }
    }
    if y.len() < 2 {
        return Err(CliError::TooFewRows(y.len()));
    }
    let x = DMatrix::from_row_slice(y.len(), m, &values);
    Ok(Dataset::new(x, y)?)
}

pub fn write_dataset(path: &Path, data: &Dataset) -> CliResult<()> {
    let mut buf = Vec::new();
    render_dataset(&mut buf, data).map_err(|e| CliError::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// CSV text with 17 significant digits per value and LF line endings.
pub fn render_dataset(out: &mut impl Write, data: &Dataset) -> std::io::Result<()> {
    let m = data.dim();
    let header: Vec<String> = (1..=m).map(|j| format!("x{j}")).chain(["y".to_string()]).collect();
    writeln!(out, "{}", header.join(","))?;
    write_table(out, data.x(), Some(data.y()))
}

/// Rows of `table`, optionally followed by one more column.
pub fn write_table(out: &mut impl Write, table: &DMatrix<f64>, last: Option<&[f64]>) -> std::io::Result<()> {
    let mut line = String::new();
    for i in 0..table.nrows() {
        line.clear();
        for j in 0..table.ncols() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_f64(table[(i, j)]));
        }
        if let Some(col) = last {
            if table.ncols() > 0 {
                line.push(',');
            }
            line.push_str(&format_f64(col[i]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}
