//! Finitely presented abelian groups, homomorphisms, kernels and quotients.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::hnf::{left_kernel, row_hnf};
use super::intmat::{normalize_row, IntMat, SparseRow};
use super::snf::Reducer;
use super::sparse::{present, reduce_coords};
use super::LinalgError;

#[derive(Debug)]
struct Inner {
    ngens: usize,
    rels: IntMat,
    moduli: Vec<BigInt>,
    coord: Vec<Vec<BigInt>>,
    lifts: Vec<SparseRow>,
}

/// `Z^n / R` for a relation matrix `R`, with cached Smith coordinates.
///
/// Cloning is cheap; the presentation data is shared.
#[derive(Clone, Debug)]
pub struct FpAb {
    inner: Arc<Inner>,
}

/// A subgroup together with its inclusion into the ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FpAb,
    pub inclusion: AbMap,
}

/// A homomorphism given on generators by an integer matrix (row convention).
#[derive(Clone, Debug)]
pub struct AbMap {
    source: FpAb,
    target: FpAb,
    matrix: IntMat,
}

fn unit(k: usize, i: usize, d: BigInt) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); k];
    v[i] = d;
    v
}

fn odd_part(d: &BigInt) -> BigInt {
    let mut d = d.clone();
    let two = BigInt::from(2);
    while !d.is_zero() && d.is_even() {
        d /= &two;
    }
    d
}

impl FpAb {
    /// The group `Z^ngens / rowspace(rels)`.
    pub fn new(ngens: usize, rels: IntMat) -> Result<FpAb, LinalgError> {
        if rels.ncols() != ngens {
            return Err(LinalgError::Shape(format!(
                "relation matrix has {} columns for {} generators",
                rels.ncols(),
                ngens
            )));
        }
        let p = present(ngens, rels.rows());
        Ok(FpAb {
            inner: Arc::new(Inner { ngens, rels, moduli: p.moduli, coord: p.coord, lifts: p.lifts }),
        })
    }

    pub fn free(n: usize) -> FpAb {
        FpAb::new(n, IntMat::zeros(0, n)).unwrap()
    }

    /// `Z/d_1 + ... + Z/d_k + Z^free` on generators in that order.
    pub fn from_invariants(orders: &[BigInt], free: usize) -> FpAb {
        let n = orders.len() + free;
        let mut rels = IntMat::zeros(0, n);
        for (i, d) in orders.iter().enumerate() {
            rels.push_row(vec![(i, d.clone())]);
        }
        FpAb::new(n, rels).unwrap()
    }

    pub fn cyclic(n: u64) -> FpAb {
        FpAb::from_invariants(&[BigInt::from(n)], 0)
    }

    pub fn ngens(&self) -> usize {
        self.inner.ngens
    }

    pub fn relations(&self) -> &IntMat {
        &self.inner.rels
    }

    /// Number of Smith coordinates (torsion coordinates, then free ones).
    pub fn num_coords(&self) -> usize {
        self.inner.moduli.len()
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.inner.moduli
    }

    /// Invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.inner.moduli.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn free_rank(&self) -> usize {
        self.inner.moduli.iter().filter(|d| d.is_zero()).count()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.inner.moduli.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.moduli.is_empty()
    }

    /// Odd parts of the invariant factors, dropping ones.
    pub fn odd_invariants(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self
            .invariant_factors()
            .iter()
            .map(odd_part)
            .filter(|d| !d.is_one())
            .collect();
        v.sort();
        v
    }

    /// Order of the odd torsion, `(|G_tors|)'`.
    pub fn odd_torsion_order(&self) -> BigInt {
        self.odd_invariants().iter().product()
    }

    /// Coordinate vector of a word in the generators.
    pub fn coords(&self, v: &[(usize, BigInt)]) -> Vec<BigInt> {
        let k = self.num_coords();
        let mut acc = vec![BigInt::zero(); k];
        for (g, c) in v {
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(self.inner.coord[*g].iter()) {
                if !y.is_zero() {
                    *x += c * y;
                }
            }
        }
        reduce_coords(&mut acc, &self.inner.moduli);
        acc
    }

    pub fn coords_i64(&self, v: &[(usize, i64)]) -> Vec<BigInt> {
        let w: Vec<(usize, BigInt)> = v.iter().map(|&(g, c)| (g, BigInt::from(c))).collect();
        self.coords(&w)
    }

    pub fn coords_dense(&self, v: &[BigInt]) -> Vec<BigInt> {
        let w: Vec<(usize, BigInt)> =
            v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(g, c)| (g, c.clone())).collect();
        self.coords(&w)
    }

    pub fn reduce(&self, c: &mut [BigInt]) {
        reduce_coords(c, &self.inner.moduli);
    }

    pub fn is_zero(&self, v: &[(usize, BigInt)]) -> bool {
        self.coords(v).iter().all(|x| x.is_zero())
    }

    pub fn is_zero_i64(&self, v: &[(usize, i64)]) -> bool {
        self.coords_i64(v).iter().all(|x| x.is_zero())
    }

    /// Order of the element with the given coordinates, `None` when infinite.
    pub fn coord_order(&self, c: &[BigInt]) -> Option<BigInt> {
        let mut ord = BigInt::one();
        for (x, d) in c.iter().zip(self.inner.moduli.iter()) {
            let x = if d.is_zero() { x.clone() } else { x.mod_floor(d) };
            if x.is_zero() {
                continue;
            }
            if d.is_zero() {
                return None;
            }
            let o = d / x.gcd(d);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }

    pub fn element_order(&self, v: &[(usize, BigInt)]) -> Option<BigInt> {
        self.coord_order(&self.coords(v))
    }

    /// A word in the generators with the given coordinates.
    pub fn lift(&self, c: &[BigInt]) -> SparseRow {
        let mut acc = Vec::new();
        for (x, l) in c.iter().zip(self.inner.lifts.iter()) {
            if x.is_zero() {
                continue;
            }
            for (g, a) in l {
                acc.push((*g, x * a));
            }
        }
        normalize_row(acc)
    }

    fn torsion_rows(&self) -> Vec<Vec<BigInt>> {
        let k = self.num_coords();
        self.inner
            .moduli
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| unit(k, i, d.clone()))
            .collect()
    }

    /// Re-reduces after adjoining `extra` (in current coordinates) to the relations.
    fn requotient(&self, extra: Vec<Vec<BigInt>>) -> FpAb {
        let k = self.num_coords();
        let mut extra_rels = self.inner.rels.clone();
        for row in &extra {
            let w = self.lift(row);
            if !w.is_empty() {
                extra_rels.push_row(w);
            }
        }
        let mut lattice = self.torsion_rows();
        lattice.extend(extra);
        rebuild(self.inner.ngens, extra_rels, &self.inner.coord, &self.inner.lifts, lattice, k)
    }

    /// Quotient by the subgroup generated by the given words.
    pub fn quotient(&self, gens: &[SparseRow]) -> FpAb {
        let rows = gens.iter().map(|g| self.coords(g)).collect();
        self.requotient(rows)
    }

    pub fn quotient_coords(&self, rows: Vec<Vec<BigInt>>) -> FpAb {
        self.requotient(rows)
    }

    /// Quotient by the 2-primary torsion; its invariants are the odd invariants.
    pub fn odd_quotient(&self) -> FpAb {
        let k = self.num_coords();
        let rows = self
            .inner
            .moduli
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| unit(k, i, odd_part(d)))
            .collect();
        self.requotient(rows)
    }

    /// Subgroup generated by words in the generators.
    pub fn subgroup(&self, gens: &[SparseRow]) -> Subgroup {
        let rows = gens.iter().map(|g| self.coords(g)).collect();
        self.subgroup_coords(rows)
    }

    /// Subgroup generated by elements given in coordinates.
    pub fn subgroup_coords(&self, gens: Vec<Vec<BigInt>>) -> Subgroup {
        let k = self.num_coords();
        let tors = self.torsion_rows();
        let mut all = gens;
        all.extend(tors.iter().cloned());
        let basis = row_hnf(all, k);
        // drop basis rows that already vanish
        let basis: Vec<Vec<BigInt>> = basis;
        let t = basis.len();
        let mut stacked = basis.clone();
        stacked.extend(tors);
        let ker = left_kernel(&stacked, k);
        let mut rels = IntMat::zeros(0, t);
        for v in ker {
            rels.push_dense(&v[..t]);
        }
        let group = FpAb::new(t, rels).expect("shape");
        let mut incl = IntMat::zeros(0, self.ngens());
        for b in &basis {
            incl.push_row(self.lift(b));
        }
        let inclusion = AbMap { source: group.clone(), target: self.clone(), matrix: incl };
        Subgroup { group, inclusion }
    }

    /// External direct sum; generators of `other` follow those of `self`.
    pub fn direct_sum(&self, other: &FpAb) -> FpAb {
        let (n1, n2) = (self.ngens(), other.ngens());
        let (k1, k2) = (self.num_coords(), other.num_coords());
        let mut rels = IntMat::zeros(0, n1 + n2);
        for r in self.relations().rows() {
            rels.push_row(r.clone());
        }
        for r in other.relations().rows() {
            rels.push_row(r.iter().map(|(j, v)| (j + n1, v.clone())).collect());
        }
        let mut coord = Vec::with_capacity(n1 + n2);
        for c in &self.inner.coord {
            let mut v = c.clone();
            v.extend(std::iter::repeat_n(BigInt::zero(), k2));
            coord.push(v);
        }
        for c in &other.inner.coord {
            let mut v = vec![BigInt::zero(); k1];
            v.extend(c.iter().cloned());
            coord.push(v);
        }
        let mut lifts = self.inner.lifts.clone();
        for l in &other.inner.lifts {
            lifts.push(l.iter().map(|(j, v)| (j + n1, v.clone())).collect());
        }
        let mut lattice = Vec::new();
        for (i, d) in self.inner.moduli.iter().chain(other.inner.moduli.iter()).enumerate() {
            if !d.is_zero() {
                lattice.push(unit(k1 + k2, i, d.clone()));
            }
        }
        rebuild(n1 + n2, rels, &coord, &lifts, lattice, k1 + k2)
    }

    /// Identity map.
    pub fn identity(&self) -> AbMap {
        AbMap { source: self.clone(), target: self.clone(), matrix: IntMat::identity(self.ngens()) }
    }

    /// Human-readable structure, e.g. `Z/2 + Z/6 + Z`.
    pub fn structure(&self) -> String {
        let mut parts: Vec<String> = self.invariant_factors().iter().map(|d| format!("Z/{d}")).collect();
        for _ in 0..self.free_rank() {
            parts.push("Z".to_string());
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for FpAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.structure())
    }
}

/// Builds a group from a coordinate system `Z^k / lattice` and the maps into it.
fn rebuild(
    ngens: usize,
    rels: IntMat,
    coord: &[Vec<BigInt>],
    lifts: &[SparseRow],
    lattice: Vec<Vec<BigInt>>,
    k: usize,
) -> FpAb {
    let basis = row_hnf(lattice, k);
    let mut red = Reducer::new(basis, k, false, true);
    let rank = red.run();
    let v = red.v.take().unwrap();
    let vinv = red.vinv.take().unwrap();
    let mut keep = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..k {
        let d = if i < rank { red.a[i][i].clone() } else { BigInt::zero() };
        if d.is_one() {
            continue;
        }
        keep.push(i);
        moduli.push(d);
    }
    let new_coord: Vec<Vec<BigInt>> = coord
        .iter()
        .map(|c| {
            let mut out: Vec<BigInt> = keep
                .iter()
                .map(|&i| {
                    let mut s = BigInt::zero();
                    for (j, x) in c.iter().enumerate() {
                        if !x.is_zero() && !v[j][i].is_zero() {
                            s += x * &v[j][i];
                        }
                    }
                    s
                })
                .collect();
            reduce_coords(&mut out, &moduli);
            out
        })
        .collect();
    let new_lifts: Vec<SparseRow> = keep
        .iter()
        .map(|&i| {
            let mut acc = Vec::new();
            for (j, x) in vinv[i].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (g, a) in &lifts[j] {
                    acc.push((*g, x * a));
                }
            }
            normalize_row(acc)
        })
        .collect();
    FpAb { inner: Arc::new(Inner { ngens, rels, moduli, coord: new_coord, lifts: new_lifts }) }
}

impl AbMap {
    /// A homomorphism; fails if some source relation does not map to zero.
    pub fn new(source: FpAb, target: FpAb, matrix: IntMat) -> Result<AbMap, LinalgError> {
        if matrix.nrows() != source.ngens() || matrix.ncols() != target.ngens() {
            return Err(LinalgError::Shape(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                source.ngens(),
                target.ngens()
            )));
        }
        for (i, r) in source.relations().rows().iter().enumerate() {
            let img = matrix.apply(r);
            if !target.is_zero(&img) {
                return Err(LinalgError::NotAHomomorphism { relation: i });
            }
        }
        Ok(AbMap { source, target, matrix })
    }

    pub fn source(&self) -> &FpAb {
        &self.source
    }

    pub fn target(&self) -> &FpAb {
        &self.target
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn apply(&self, v: &[(usize, BigInt)]) -> SparseRow {
        self.matrix.apply(v)
    }

    /// Target coordinates of the image of a source word.
    pub fn apply_coords(&self, v: &[(usize, BigInt)]) -> Vec<BigInt> {
        self.target.coords(&self.apply(v))
    }

    /// The induced map on Smith coordinates, one row per source coordinate.
    pub fn coord_matrix(&self) -> Vec<Vec<BigInt>> {
        self.source
            .inner
            .lifts
            .iter()
            .map(|l| self.target.coords(&self.matrix.apply(l)))
            .collect()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AbMap) -> Result<AbMap, LinalgError> {
        let m = self.matrix.mul(&next.matrix)?;
        Ok(AbMap { source: self.source.clone(), target: next.target.clone(), matrix: m })
    }

    /// Restriction along a subgroup inclusion.
    pub fn restrict(&self, sub: &Subgroup) -> AbMap {
        sub.inclusion.then(self).expect("subgroup of the source")
    }

    pub fn kernel(&self) -> Subgroup {
        let psi = self.coord_matrix();
        let ka = self.source.num_coords();
        let kb = self.target.num_coords();
        let mut stacked = psi;
        stacked.extend(self.target.torsion_rows());
        let ker = left_kernel(&stacked, kb);
        let gens: Vec<Vec<BigInt>> = ker.into_iter().map(|v| v[..ka].to_vec()).collect();
        self.source.subgroup_coords(gens)
    }

    pub fn image(&self) -> Subgroup {
        self.target.subgroup_coords(self.coord_matrix())
    }

    pub fn cokernel(&self) -> FpAb {
        self.target.quotient_coords(self.coord_matrix())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }
}

/// Equality of invariant factors and free ranks.
pub fn iso(a: &FpAb, b: &FpAb) -> bool {
    a.invariant_factors() == b.invariant_factors() && a.free_rank() == b.free_rank()
}

/// Isomorphism after inverting 2: equal odd invariants and free ranks.
pub fn iso_odd(a: &FpAb, b: &FpAb) -> bool {
    a.odd_invariants() == b.odd_invariants() && a.free_rank() == b.free_rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cokernel_of_two_by_two() {
        let g = FpAb::new(2, IntMat::from_i64(&[vec![2, 4], vec![6, 8]])).unwrap();
        assert_eq!(g.invariant_factors(), bi(&[2, 4]));
        assert_eq!(g.order(), Some(BigInt::from(8)));
    }

    #[test]
    fn free_part() {
        let g = FpAb::new(3, IntMat::from_i64(&[vec![0, 3, 0]])).unwrap();
        assert_eq!(g.invariant_factors(), bi(&[3]));
        assert_eq!(g.free_rank(), 2);
        assert_eq!(g.order(), None);
    }

    #[test]
    fn element_orders() {
        let g = FpAb::from_invariants(&bi(&[2, 6]), 1);
        assert_eq!(g.element_order(&[(1, BigInt::from(2))]), Some(BigInt::from(3)));
        assert_eq!(g.element_order(&[(0, BigInt::from(1)), (1, BigInt::from(3))]), Some(BigInt::from(2)));
        assert_eq!(g.element_order(&[(2, BigInt::from(1))]), None);
        assert_eq!(g.element_order(&[(1, BigInt::from(6))]), Some(BigInt::one()));
    }

    #[test]
    fn kernel_image_of_multiplication() {
        // multiplication by 2 on Z/12
        let g = FpAb::cyclic(12);
        let f = AbMap::new(g.clone(), g.clone(), IntMat::from_i64(&[vec![2]])).unwrap();
        assert_eq!(f.kernel().group.invariant_factors(), bi(&[2]));
        assert_eq!(f.image().group.invariant_factors(), bi(&[6]));
        assert_eq!(f.cokernel().invariant_factors(), bi(&[2]));
    }

    #[test]
    fn bad_map_rejected() {
        let a = FpAb::cyclic(4);
        let b = FpAb::cyclic(6);
        match AbMap::new(a, b, IntMat::from_i64(&[vec![1]])) {
            Err(LinalgError::NotAHomomorphism { relation }) => assert_eq!(relation, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_parts() {
        let a = FpAb::from_invariants(&bi(&[2, 12]), 1);
        let b = FpAb::from_invariants(&bi(&[3]), 1);
        assert!(iso_odd(&a, &b));
        assert!(!iso(&a, &b));
        assert_eq!(a.odd_quotient().invariant_factors(), bi(&[3]));
    }

    #[test]
    fn direct_sum_canonical() {
        let s = FpAb::cyclic(2).direct_sum(&FpAb::cyclic(3));
        assert_eq!(s.invariant_factors(), bi(&[6]));
    }

    proptest! {
        #[test]
        fn order_is_product_and_maps_compose(rows in prop::collection::vec(prop::collection::vec(-9i64..9, 3), 3..6)) {
            let m = IntMat::from_i64(&rows);
            let g = FpAb::new(3, m.clone()).unwrap();
            let dense = super::super::snf::invariant_factors(&m);
            prop_assert_eq!(g.invariant_factors(), dense);
            // first isomorphism theorem for the identity's kernel and image
            let id = g.identity();
            prop_assert!(id.kernel().group.is_trivial());
            prop_assert!(iso(&id.image().group, &g));
            // every lift lands on its coordinates
            for i in 0..g.num_coords() {
                let mut c = vec![BigInt::zero(); g.num_coords()];
                c[i] = BigInt::one();
                prop_assert_eq!(g.coords(&g.lift(&c)), c);
            }
        }

        #[test]
        fn kernel_plus_image_orders(n in 2u64..40, k in 0i64..40) {
            let g = FpAb::cyclic(n);
            let f = AbMap::new(g.clone(), g.clone(), IntMat::from_i64(&[vec![k]])).unwrap();
            let ko = f.kernel().group.order().unwrap();
            let io = f.image().group.order().unwrap();
            prop_assert_eq!(ko * io, BigInt::from(n));
        }
    }
}
