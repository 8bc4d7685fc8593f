//! Integer matrices stored as sparse rows.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::LinalgError;

/// A sparse row: `(column, value)` pairs sorted by column, no zero values.
pub type SparseRow = Vec<(usize, BigInt)>;

/// An integer matrix with arbitrary-precision entries.
///
/// Rows are stored sparsely; the row-vector convention is used throughout,
/// so a matrix with `r` rows and `c` columns represents a map `Z^r -> Z^c`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMat {
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl IntMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMat { ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].push((i, BigInt::one()));
        }
        m
    }

    /// Builds a matrix from dense rows. All rows must have length `ncols`.
    pub fn from_dense(ncols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, LinalgError> {
        let mut out = Self::zeros(0, ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(LinalgError::Shape(format!(
                    "row of length {} in a matrix with {} columns",
                    r.len(),
                    ncols
                )));
            }
            out.push_dense(&r);
        }
        Ok(out)
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut out = Self::zeros(0, ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            out.push_row(r.iter().enumerate().map(|(j, &v)| (j, BigInt::from(v))).collect());
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Appends a row given as arbitrary `(column, value)` pairs; duplicates are summed.
    pub fn push_row(&mut self, entries: Vec<(usize, BigInt)>) {
        let row = normalize_row(entries);
        if let Some(&(c, _)) = row.last() {
            assert!(c < self.ncols, "column {c} out of range");
        }
        self.rows.push(row);
    }

    pub fn push_row_i64(&mut self, entries: &[(usize, i64)]) {
        self.push_row(entries.iter().map(|&(c, v)| (c, BigInt::from(v))).collect());
    }

    pub fn push_dense(&mut self, row: &[BigInt]) {
        self.push_row(
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect(),
        );
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn dense_row(&self, i: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.ncols];
        for (j, v) in &self.rows[i] {
            out[*j] = v.clone();
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        (0..self.nrows()).map(|i| self.dense_row(i)).collect()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> IntMat {
        let mut cols: Vec<SparseRow> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                cols[*j].push((i, v.clone()));
            }
        }
        IntMat { ncols: self.nrows(), rows: cols }
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &IntMat) -> Result<IntMat, LinalgError> {
        if self.ncols != other.ncols {
            return Err(LinalgError::Shape(format!(
                "cannot stack {} columns on {} columns",
                other.ncols, self.ncols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(IntMat { ncols: self.ncols, rows })
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntMat) -> Result<IntMat, LinalgError> {
        if self.ncols != other.nrows() {
            return Err(LinalgError::Shape(format!(
                "product of {}x{} and {}x{}",
                self.nrows(),
                self.ncols,
                other.nrows(),
                other.ncols
            )));
        }
        let mut out = IntMat::zeros(0, other.ncols);
        for r in &self.rows {
            out.rows.push(vec_mat(r, other));
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[(usize, BigInt)]) -> SparseRow {
        vec_mat(v, self)
    }

    pub fn apply_dense(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.nrows());
        let mut out = vec![BigInt::zero(); self.ncols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, a) in &self.rows[i] {
                out[*j] += c * a;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Plain-text dump: a `rows cols` header line, then one line of integers per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nrows(), self.ncols);
        for i in 0..self.nrows() {
            let line: Vec<String> = self.dense_row(i).iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<IntMat, LinalgError> {
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| -> Result<BigInt, LinalgError> {
            let t = tokens
                .next()
                .ok_or_else(|| LinalgError::Parse(format!("missing {what}")))?;
            t.parse::<BigInt>()
                .map_err(|_| LinalgError::Parse(format!("bad integer {t:?}")))
        };
        let to_usize = |v: BigInt| -> Result<usize, LinalgError> {
            usize::try_from(v).map_err(|_| LinalgError::Parse("bad dimension".into()))
        };
        let nrows = to_usize(next("row count")?)?;
        let ncols = to_usize(next("column count")?)?;
        let mut m = IntMat::zeros(0, ncols);
        for _ in 0..nrows {
            let mut row = Vec::with_capacity(ncols);
            for _ in 0..ncols {
                row.push(next("entry")?);
            }
            m.push_dense(&row);
        }
        Ok(m)
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn normalize_row(mut entries: Vec<(usize, BigInt)>) -> SparseRow {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(entries.len());
    for (j, v) in entries {
        match out.last_mut() {
            Some((lj, lv)) if *lj == j => *lv += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

fn vec_mat(v: &[(usize, BigInt)], m: &IntMat) -> SparseRow {
    let mut acc = std::collections::BTreeMap::<usize, BigInt>::new();
    for (i, c) in v {
        if c.is_zero() {
            continue;
        }
        for (j, a) in &m.rows[*i] {
            *acc.entry(*j).or_insert_with(BigInt::zero) += c * a;
        }
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = IntMat::from_i64(&[vec![1, 0, -3], vec![0, 7, 2]]);
        let t = m.to_text();
        assert_eq!(t, "2 3\n1 0 -3\n0 7 2\n");
        assert_eq!(IntMat::from_text(&t).unwrap(), m);
    }

    #[test]
    fn product_and_transpose() {
        let a = IntMat::from_i64(&[vec![1, 2], vec![3, 4]]);
        let b = IntMat::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), IntMat::from_i64(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose(), IntMat::from_i64(&[vec![1, 3], vec![2, 4]]));
        assert!(a.mul(&IntMat::zeros(3, 1)).is_err());
    }
}
