//! Smith normal form with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::intmat::IntMat;

/// Result of [`snf`]: `U * M * V = D` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal of `D`: nonzero entries first, each dividing the next.
    pub diagonal: Vec<BigInt>,
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

impl SmithForm {
    /// Diagonal entries greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }
}

/// Dense working state; transforms are tracked only when requested.
pub(crate) struct Reducer {
    pub a: Vec<Vec<BigInt>>,
    pub u: Option<Vec<Vec<BigInt>>>,
    pub v: Option<Vec<Vec<BigInt>>>,
    pub vinv: Option<Vec<Vec<BigInt>>>,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer quotient keeps remainders small
    let (q, r) = a.div_mod_floor(b);
    // r has the sign of b, so r - b is the other candidate remainder
    if (&r + &r).abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

impl Reducer {
    pub(crate) fn new(a: Vec<Vec<BigInt>>, ncols: usize, track_u: bool, track_v: bool) -> Self {
        let m = a.len();
        Reducer {
            a,
            u: track_u.then(|| ident(m)),
            v: track_v.then(|| ident(ncols)),
            vinv: track_v.then(|| ident(ncols)),
        }
    }

    fn ncols(&self) -> usize {
        match (self.a.first(), &self.v) {
            (Some(r), _) => r.len(),
            (None, Some(v)) => v.len(),
            _ => 0,
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r.swap(i, j);
            }
        }
        if let Some(w) = &mut self.vinv {
            w.swap(i, j);
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let (ri, rj) = two_mut(&mut self.a, i, j);
        super::hnf::axpy(ri, q, rj);
        if let Some(u) = &mut self.u {
            let (ui, uj) = two_mut(u, i, j);
            super::hnf::axpy(ui, q, uj);
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in self.a.iter_mut() {
            if !r[j].is_zero() {
                let t = q * &r[j];
                r[i] += t;
            }
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                if !r[j].is_zero() {
                    let t = q * &r[j];
                    r[i] += t;
                }
            }
        }
        // inverse transform: row_j -= q * row_i
        if let Some(w) = &mut self.vinv {
            let (wj, wi) = two_mut(w, j, i);
            super::hnf::axpy(wj, &(-q), wi);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }

    /// Picks the nonzero entry of least absolute value in the trailing block,
    /// preferring sparse rows and columns among ties.
    fn pick_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let m = self.a.len();
        let n = self.ncols();
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        let col_counts: Vec<usize> = (t..n)
            .map(|j| (t..m).filter(|&i| !self.a[i][j].is_zero()).count())
            .collect();
        for i in t..m {
            let rc = (t..n).filter(|&j| !self.a[i][j].is_zero()).count();
            for j in t..n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                let cost = (rc - 1) * (col_counts[j - t] - 1);
                let better = match &best {
                    None => true,
                    Some((b, bc, _, _)) => ax < *b || (ax == *b && cost < *bc),
                };
                if better {
                    best = Some((ax, cost, i, j));
                }
            }
        }
        best.map(|(_, _, i, j)| (i, j))
    }

    /// Reduces to Smith form in place; returns the rank.
    pub(crate) fn run(&mut self) -> usize {
        let m = self.a.len();
        let n = self.ncols();
        let mut t = 0;
        while t < m.min(n) {
            let (pi, pj) = match self.pick_pivot(t) {
                Some(p) => p,
                None => break,
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[i][t], &self.a[t][t]);
                    self.add_row(i, t, &(-q));
                    if !self.a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[t][j], &self.a[t][t]);
                    self.add_col(j, t, &(-q));
                    if !self.a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // move the smallest entry of row/column t into the pivot slot
                    let mut bi = t;
                    let mut bj = t;
                    let mut bv = self.a[t][t].abs();
                    for i in t + 1..m {
                        let x = self.a[i][t].abs();
                        if !x.is_zero() && x < bv {
                            bv = x;
                            bi = i;
                            bj = t;
                        }
                    }
                    for j in t + 1..n {
                        let x = self.a[t][j].abs();
                        if !x.is_zero() && x < bv {
                            bv = x;
                            bi = t;
                            bj = j;
                        }
                    }
                    self.swap_rows(t, bi);
                    self.swap_cols(t, bj);
                    continue;
                }
                // divisibility of the trailing block
                let piv = self.a[t][t].clone();
                let bad = (t + 1..m).find(|&i| {
                    (t + 1..n).any(|j| !self.a[i][j].is_zero() && !(&self.a[i][j] % &piv).is_zero())
                });
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }
}

fn two_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = v.split_at_mut(j);
        (&mut a[i], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(i);
        (&mut b[0], &mut a[j])
    }
}

fn to_mat(rows: Vec<Vec<BigInt>>, ncols: usize) -> IntMat {
    let mut m = IntMat::zeros(0, ncols);
    for r in rows {
        m.push_dense(&r);
    }
    m
}

/// Smith normal form of `m` together with the transforms.
pub fn snf(m: &IntMat) -> SmithForm {
    let (r, c) = (m.nrows(), m.ncols());
    let mut red = Reducer::new(m.to_dense(), c, true, true);
    let rank = red.run();
    let diagonal: Vec<BigInt> = (0..r.min(c)).map(|i| red.a[i][i].clone()).collect();
    SmithForm {
        diagonal,
        d: to_mat(red.a, c),
        u: to_mat(red.u.unwrap(), r),
        v: to_mat(red.v.unwrap(), c),
        rank,
    }
}

/// Invariant factors (diagonal entries > 1) of the cokernel of `m`.
pub fn invariant_factors(m: &IntMat) -> Vec<BigInt> {
    let mut red = Reducer::new(m.to_dense(), m.ncols(), false, false);
    let rank = red.run();
    (0..rank)
        .map(|i| red.a[i][i].clone())
        .filter(|d| *d > BigInt::one())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(m: &IntMat) -> SmithForm {
        let s = snf(m);
        let prod = s.u.mul(m).unwrap().mul(&s.v).unwrap();
        assert_eq!(prod, s.d);
        for w in s.diagonal.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        s
    }

    #[test]
    fn two_by_two() {
        let s = check(&IntMat::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn zero_and_rectangular() {
        let s = check(&IntMat::from_i64(&[vec![0, 0, 0], vec![0, 0, 0]]));
        assert_eq!(s.rank, 0);
        let s = check(&IntMat::from_i64(&[vec![4, 6, 10], vec![6, 9, 15]]));
        assert_eq!(s.rank, 1);
    }

    proptest! {
        #[test]
        fn transforms_hold(rows in prop::collection::vec(prop::collection::vec(-20i64..20, 4), 1..5)) {
            let m = IntMat::from_i64(&rows);
            let s = snf(&m);
            prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
            for w in s.diagonal.windows(2) {
                if !w[1].is_zero() {
                    prop_assert!((&w[1] % &w[0]).is_zero());
                }
            }
        }
    }
}
