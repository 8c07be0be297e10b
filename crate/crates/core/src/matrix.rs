//! Dense real matrices whose rows and columns carry vertex or edge labels.
//!
//! Text format: the first non-comment line lists the column labels; every
//! following line is a row label followed by one value per column. Lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::MatrixError;

/// Significant digits used by [`LabeledMatrix::to_text`] and vector output.
pub const OUTPUT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    data: Vec<f64>,
}

impl LabeledMatrix {
    /// Builds a matrix from row-major `data`. Fails on a size mismatch or a
    /// non-finite entry.
    pub fn new(rows: Vec<String>, cols: Vec<String>, data: Vec<f64>) -> Result<Self, MatrixError> {
        if data.len() != rows.len() * cols.len() {
            return Err(MatrixError::Dimension(format!(
                "{} values for a {}x{} matrix",
                data.len(),
                rows.len(),
                cols.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite { row: k / cols.len(), col: k % cols.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: Vec<String>, cols: Vec<String>) -> Self {
        let data = vec![0.0; rows.len() * cols.len()];
        Self { rows, cols, data }
    }

    /// Convenience constructor for tests and fixtures: labels `1..=n`.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, MatrixError> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(numbered(rows.len()), numbered(ncols), data)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols.len() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.cols.len();
        self.data[i * n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.cols.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.rows.iter().position(|l| l == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.cols.iter().position(|l| l == label)
    }

    pub fn transpose(&self) -> Self {
        let (m, n) = (self.nrows(), self.ncols());
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                data[j * m + i] = self.get(i, j);
            }
        }
        Self { rows: self.cols.clone(), cols: self.rows.clone(), data }
    }

    /// `self · rhs`, labelled by `self`'s rows and `rhs`'s columns.
    pub fn matmul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.ncols() != rhs.nrows() {
            return Err(MatrixError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        let (m, k, n) = (self.nrows(), self.ncols(), rhs.ncols());
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for p in 0..k {
                let a = self.get(i, p);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.get(p, j);
                }
            }
        }
        Ok(Self { rows: self.rows.clone(), cols: rhs.cols.clone(), data })
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if x.len() != self.ncols() {
            return Err(MatrixError::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.ncols()
            )));
        }
        Ok((0..self.nrows())
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.nrows() != rhs.nrows() || self.ncols() != rhs.ncols() {
            return Err(MatrixError::Dimension("shape mismatch in subtraction".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows.clone(), cols: self.cols.clone(), data })
    }

    /// Rows `ri` and columns `ci` (by position), in the given order.
    pub fn select(&self, ri: &[usize], ci: &[usize]) -> Self {
        let mut data = Vec::with_capacity(ri.len() * ci.len());
        for &i in ri {
            for &j in ci {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: ri.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: ci.iter().map(|&j| self.cols[j].clone()).collect(),
            data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference; `None` if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return None;
        }
        Some(self.data.iter().zip(&other.data).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn relabel(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self, MatrixError> {
        if rows.len() != self.rows.len() || cols.len() != self.cols.len() {
            return Err(MatrixError::Dimension("label count mismatch".into()));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.cols.join(" "));
        out.push('\n');
        for (i, label) in self.rows.iter().enumerate() {
            out.push_str(label);
            for v in self.row(i) {
                let _ = write!(out, " {}", format_sig(*v, OUTPUT_DIGITS));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((_, header)) = lines.next() else {
            return Err(MatrixError::Parse { line: 1, msg: "missing column header".into() });
        };
        let cols: Vec<String> = header.split_whitespace().map(str::to_owned).collect();
        let mut rows = Vec::new();
        let mut data = Vec::new();
        for (line, l) in lines {
            let mut toks = l.split_whitespace();
            let label = toks.next().unwrap_or_default().to_owned();
            let mut count = 0;
            for tok in toks {
                let v: f64 = tok.parse().map_err(|_| MatrixError::Parse {
                    line,
                    msg: format!("invalid number {tok:?}"),
                })?;
                if !v.is_finite() {
                    return Err(MatrixError::Parse { line, msg: format!("non-finite value {tok:?}") });
                }
                data.push(v);
                count += 1;
            }
            if count != cols.len() {
                return Err(MatrixError::Parse {
                    line,
                    msg: format!("expected {} values, found {count}", cols.len()),
                });
            }
            rows.push(label);
        }
        Self::new(rows, cols, data)
    }
}

pub(crate) fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Formats `v` with at most `digits` significant digits, trimming trailing
/// zeros (in the spirit of C's `%.12g`).
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(2.0, 12), "2");
        assert_eq!(format_sig(-0.5, 12), "-0.5");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(-5.0 / 3.0, 12), "-1.66666666667");
        assert_eq!(format_sig(1.98, 12), "1.98");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e14");
    }

    #[test]
    fn text_round_trip_within_output_precision() {
        let m = LabeledMatrix::from_rows(&[&[2.0, -1.0 / 3.0], &[0.0, 1.0 / 3.0]]).unwrap();
        let back = LabeledMatrix::parse_text(&m.to_text()).unwrap();
        assert_eq!(back.row_labels(), m.row_labels());
        assert!(back.max_abs_diff(&m).unwrap() < 1e-11);
    }

    #[test]
    fn parse_rejects_short_rows() {
        let err = LabeledMatrix::parse_text("a b\na 1\n").unwrap_err();
        assert!(matches!(err, MatrixError::Parse { line: 2, .. }));
    }

    #[test]
    fn non_finite_entries_rejected() {
        let err = LabeledMatrix::new(numbered(1), numbered(2), vec![1.0, f64::NAN]).unwrap_err();
        assert_eq!(err, MatrixError::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn matmul_and_transpose() {
        let a = LabeledMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let p = a.matmul(&a.transpose()).unwrap();
        assert_eq!(p.data(), &[5.0, 11.0, 11.0, 25.0]);
        assert!(a.matmul(&LabeledMatrix::from_rows(&[&[1.0]]).unwrap()).is_err());
    }
}
