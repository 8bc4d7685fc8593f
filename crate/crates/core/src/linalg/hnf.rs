//! Hermite normal forms and integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::intmat::IntMat;

/// Incrementally maintained row echelon basis of an integer lattice.
///
/// Pivots are only taken in the first `pivot_cols` columns; trailing columns
/// ride along (used for transform bookkeeping).
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pivot_cols: usize,
    /// `(pivot column, row)` sorted by pivot column.
    basis: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub(crate) fn new(pivot_cols: usize) -> Self {
        Echelon { pivot_cols, basis: Vec::new() }
    }

    /// Inserts a row; returns the reduced remainder when it has no pivot left.
    pub(crate) fn insert(&mut self, mut v: Vec<BigInt>) -> Option<Vec<BigInt>> {
        let mut k = 0;
        loop {
            let lead = match (0..self.pivot_cols).find(|&j| !v[j].is_zero()) {
                Some(j) => j,
                None => return Some(v),
            };
            while k < self.basis.len() && self.basis[k].0 < lead {
                k += 1;
            }
            if k == self.basis.len() || self.basis[k].0 != lead {
                if v[lead].is_negative() {
                    negate(&mut v);
                }
                self.basis.insert(k, (lead, v));
                return None;
            }
            let b = &mut self.basis[k].1;
            let alpha = b[lead].clone();
            let beta = v[lead].clone();
            if (&beta % &alpha).is_zero() {
                let q = &beta / &alpha;
                axpy(&mut v, &(-q), b);
            } else {
                let eg = alpha.extended_gcd(&beta);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let a_g = &alpha / &g;
                let b_g = &beta / &g;
                let new_b: Vec<BigInt> = b
                    .iter()
                    .zip(v.iter())
                    .map(|(bi, vi)| &x * bi + &y * vi)
                    .collect();
                let new_v: Vec<BigInt> = b
                    .iter()
                    .zip(v.iter())
                    .map(|(bi, vi)| &a_g * vi - &b_g * bi)
                    .collect();
                *b = new_b;
                if b[lead].is_negative() {
                    negate(b);
                }
                v = new_v;
            }
        }
    }

    /// Reduces entries above each pivot into `[0, pivot)` and returns the rows.
    pub(crate) fn into_reduced(mut self) -> Vec<Vec<BigInt>> {
        for i in (0..self.basis.len()).rev() {
            let (c, piv) = {
                let (c, row) = &self.basis[i];
                (*c, row.clone())
            };
            for k in 0..i {
                let e = self.basis[k].1[c].clone();
                if e.is_zero() {
                    continue;
                }
                let q = e.div_floor(&piv[c]);
                if !q.is_zero() {
                    axpy(&mut self.basis[k].1, &(-q), &piv);
                }
            }
        }
        self.basis.into_iter().map(|(_, r)| r).collect()
    }
}

pub(crate) fn axpy(v: &mut [BigInt], a: &BigInt, w: &[BigInt]) {
    if a.is_zero() {
        return;
    }
    for (vi, wi) in v.iter_mut().zip(w.iter()) {
        if !wi.is_zero() {
            *vi += a * wi;
        }
    }
}

fn negate(v: &mut [BigInt]) {
    for x in v.iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Row Hermite normal form of the lattice spanned by `rows` (zero rows dropped).
pub(crate) fn row_hnf(rows: impl IntoIterator<Item = Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        debug_assert_eq!(r.len(), ncols);
        e.insert(r);
    }
    e.into_reduced()
}

/// A basis (in Hermite form) of `{x : x * A = 0}` for `A` given by its rows.
pub(crate) fn left_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let r = rows.len();
    let mut e = Echelon::new(ncols);
    let mut kernel = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut aug = Vec::with_capacity(ncols + r);
        aug.extend(row.iter().cloned());
        aug.extend((0..r).map(|j| if j == i { BigInt::one() } else { BigInt::zero() }));
        if let Some(rem) = e.insert(aug) {
            kernel.push(rem[ncols..].to_vec());
        }
    }
    row_hnf(kernel, r)
}

/// Column-style Hermite normal form `H = M * U` with `U` unimodular.
///
/// Pivots are positive and the entries to the left of each pivot lie in `[0, pivot)`.
pub fn hnf(m: &IntMat) -> IntMat {
    let t = m.transpose();
    let rows = row_hnf(t.to_dense(), t.ncols());
    let mut h = IntMat::zeros(0, m.nrows());
    for r in rows {
        h.push_dense(&r);
    }
    let mut out = h.transpose();
    // keep the column count of the input
    if out.ncols() < m.ncols() {
        let mut padded = IntMat::zeros(0, m.ncols());
        for i in 0..out.nrows() {
            padded.push_row(out.row(i).clone());
        }
        out = padded;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_small() {
        let m = IntMat::from_i64(&[vec![2, 4], vec![6, 8]]);
        let h = hnf(&m);
        // column lattice of m is spanned by (2,6),(4,8) -> (2,0),(0,4) after reduction
        assert_eq!(h, IntMat::from_i64(&[vec![2, 0], vec![2, 4]]));
    }

    #[test]
    fn kernel_basis() {
        let rows = vec![b(&[1, 2]), b(&[2, 4]), b(&[3, 6])];
        let k = left_kernel(&rows, 2);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s0: BigInt = v.iter().zip(rows.iter()).map(|(c, r)| c * &r[0]).sum();
            assert!(s0.is_zero());
        }
    }
}
