use std::fmt::Write;

use nalgebra::DMatrix;

use crate::error::{ForgeError, Result};
use crate::linalg;

/// A parsed matrix file, symmetrized by averaging with its transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub matrix: DMatrix<f64>,
    /// `max |A_ij − A_ji|` of the matrix as written.
    pub asymmetry: f64,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> ForgeError {
    ForgeError::Parse { line, column, message: message.into() }
}

/// Tokens of one line with their 1-based columns. Commas and whitespace both
/// separate entries.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        let sep = ch.is_whitespace() || ch == ',';
        match (sep, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Header line `N`, then `N` rows of `N` decimals. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_error(1, 1, "empty file, expected the dimension N"))?;
    let htoks = tokens(header);
    let (hcol, htok) = htoks[0];
    if htoks.len() != 1 {
        return Err(parse_error(hline, htoks[1].0, "header must hold only the dimension N"));
    }
    let n: usize = htok
        .parse()
        .map_err(|_| parse_error(hline, hcol, format!("expected a positive integer dimension, found `{htok}`")))?;
    if n == 0 {
        return Err(parse_error(hline, hcol, "dimension must be positive"));
    }
    let mut a = DMatrix::zeros(n, n);
    let mut last_line = hline;
    for row in 0..n {
        let (lno, line) =
            lines.next().ok_or_else(|| parse_error(last_line + 1, 1, format!("expected {n} rows, found {row}")))?;
        last_line = lno;
        let toks = tokens(line);
        if toks.len() != n {
            let col = toks.get(n).map_or(line.len() + 1, |t| t.0);
            return Err(parse_error(lno, col, format!("expected {n} entries, found {}", toks.len())));
        }
        for (j, (col, tok)) in toks.into_iter().enumerate() {
            let v: f64 = tok.parse().map_err(|_| parse_error(lno, col, format!("`{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(lno, col, "entry is not finite"));
            }
            a[(row, j)] = v;
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(parse_error(lno, 1, format!("trailing content after {n} rows")));
    }
    Ok(MatrixFile { asymmetry: linalg::asymmetry(&a), matrix: linalg::symmetrize(&a) })
}

pub fn read_matrix_file(path: &str) -> Result<MatrixFile> {
    let text = std::fs::read_to_string(path).map_err(|e| ForgeError::Io(format!("{path}: {e}")))?;
    parse_matrix(&text)
}

/// Inverse of [`parse_matrix`], with shortest round-trip decimals.
pub fn write_matrix(m: &DMatrix<f64>) -> String {
    let mut s = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}
