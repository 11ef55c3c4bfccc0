//! LIBSVM / SVMlight text format.
//!
//! One sample per line: `<label> <index>:<value> ...` with 1-based, strictly
//! increasing indices. `#` starts a comment that runs to the end of the line
//! and blank lines are skipped. Labels must be `±1`; `0` is accepted as `−1`.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, Vector};
use crate::problems::logistic::LogisticData;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads samples into a sparse design matrix and a `±1` label vector.
///
/// The column count is the largest index seen.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<LogisticData> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels: Vector = Vec::new();
    let mut cols = 0usize;
    let mut zero_labels = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else { continue };

        let raw: f64 = label_tok.parse().map_err(|_| parse_err(lineno, format!("invalid label {label_tok:?}")))?;
        let label = if raw == 1.0 {
            1.0
        } else if raw == -1.0 {
            -1.0
        } else if raw == 0.0 {
            zero_labels += 1;
            -1.0
        } else {
            return Err(parse_err(lineno, format!("label {label_tok} cannot be mapped to -1/+1")));
        };

        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) =
                tok.split_once(':').ok_or_else(|| parse_err(lineno, format!("expected index:value, got {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| parse_err(lineno, format!("invalid feature index {idx:?}")))?;
            let val: f64 = val.parse().map_err(|_| parse_err(lineno, format!("invalid feature value {val:?}")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_err(lineno, format!("feature index {idx} is not increasing")));
            }
            last = idx;
            row.push((idx - 1, val));
        }
        cols = cols.max(last);
        rows.push(row);
        labels.push(label);
    }

    if rows.is_empty() {
        return Err(parse_err(0, "no samples"));
    }
    if zero_labels > 0 {
        log::warn!("mapped {zero_labels} labels 0 -> -1");
    }
    let a = SparseMatrix::from_rows(cols, rows)?;
    LogisticData::new(a, labels)
}

/// Writes samples in the format accepted by [`parse_libsvm`].
///
/// Values use the shortest representation that parses back to the same bits.
pub fn write_libsvm(data: &LogisticData) -> String {
    let mut out = String::new();
    for i in 0..data.a.rows() {
        out.push_str(if data.b[i] > 0.0 { "+1" } else { "-1" });
        let (idx, val) = data.a.row(i);
        for (j, v) in idx.iter().zip(val) {
            write!(out, " {}:{}", j + 1, v).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}
