//! File formats: matrices as headerless CSV (comma separator, `.` decimal,
//! LF line ends) and factor pairs as JSON `{"x": [[...]], "theta": [[...]]}`.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::FactorPair;

/// Parses a headerless CSV of finite decimals into a rectangular matrix.
pub fn parse_matrix_csv(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number {field:?}", lineno + 1)))?;
            if !value.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite value", lineno + 1)));
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((m, n), |(i, j)| rows[i][j]))
}

pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix_csv(&text)
}

/// Formats a matrix as headerless CSV. Values print with the shortest
/// round-trip representation, so writing is bit-stable.
pub fn format_matrix_csv(matrix: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in matrix.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("string write cannot fail");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    std::fs::write(path, format_matrix_csv(matrix))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct FactorPairDoc {
    x: Vec<Vec<f64>>,
    theta: Vec<Vec<f64>>,
}

fn to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<Array2<f64>> {
    if rows.is_empty() {
        return Err(Error::Parse(format!("{what}: empty matrix")));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what}: ragged or empty rows")));
    }
    Ok(Array2::from_shape_fn((rows.len(), n), |(i, j)| rows[i][j]))
}

pub fn factor_pair_to_json(pair: &FactorPair) -> String {
    serde_json::to_string_pretty(&FactorPairDoc {
        x: to_rows(&pair.x),
        theta: to_rows(&pair.theta),
    })
    .expect("factor pair serialization cannot fail")
}

pub fn factor_pair_from_json(text: &str) -> Result<FactorPair> {
    let doc: FactorPairDoc = serde_json::from_str(text)?;
    FactorPair::new(from_rows(&doc.x, "x")?, from_rows(&doc.theta, "theta")?)
}

pub fn write_factor_pair_json(path: &Path, pair: &FactorPair) -> Result<()> {
    std::fs::write(path, factor_pair_to_json(pair))?;
    Ok(())
}

pub fn read_factor_pair_json(path: &Path) -> Result<FactorPair> {
    let text = std::fs::read_to_string(path)?;
    factor_pair_from_json(&text)
}
