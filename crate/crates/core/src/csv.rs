//! Plain-text matrix format: one row per line, comma-separated decimal
//! values, no header. Any representation `f64::from_str` accepts parses;
//! formatting uses the shortest decimal that round-trips exactly.

use crate::linalg::{LinalgError, Matrix};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvError {
    Empty,
    RaggedRow {
        line: usize,
        expected: usize,
        got: usize,
    },
    BadNumber {
        line: usize,
        column: usize,
        token: String,
    },
    Invalid(LinalgError),
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::Empty => write!(f, "no rows found"),
            CsvError::RaggedRow {
                line,
                expected,
                got,
            } => write!(f, "line {line}: expected {expected} values, got {got}"),
            CsvError::BadNumber {
                line,
                column,
                token,
            } => write!(f, "line {line}, column {column}: cannot parse {token:?}"),
            CsvError::Invalid(e) => write!(f, "invalid matrix: {e}"),
        }
    }
}

impl std::error::Error for CsvError {}

/// Parses a matrix from CSV text. Blank lines are ignored.
pub fn parse_matrix(text: &str) -> Result<Matrix, CsvError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col_idx, token) in trimmed.split(',').enumerate() {
            let token = token.trim();
            let value: f64 = token.parse().map_err(|_| CsvError::BadNumber {
                line: line_idx + 1,
                column: col_idx + 1,
                token: token.to_string(),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CsvError::RaggedRow {
                    line: line_idx + 1,
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CsvError::Empty);
    }
    let (n_rows, n_cols) = (rows.len(), rows[0].len());
    let data = rows.into_iter().flatten().collect();
    Matrix::new(n_rows, n_cols, data).map_err(CsvError::Invalid)
}

/// Formats a matrix as CSV, preserving every value exactly.
pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            // + 0.0 normalizes negative zero.
            out.push_str(&(m.get(i, j) + 0.0).to_string());
        }
        out.push('\n');
    }
    out
}
