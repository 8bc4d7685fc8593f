//! The group ring `R_A = Z[G_A]` of the square-class group and modules over it.
//!
//! For a finite ring, `G_A` is an `F_2`-vector space and its elements are
//! bitmasks (product = XOR). The same element type is reused with rational
//! square classes through the [`SqClass`] trait.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;

use crate::linalg::{normalize, AbMap, FpAb, IntMat, SparseRow, Subgroup};

/// A multiplicatively written elementary abelian 2-group.
pub trait SqClass: Ord + Clone + Debug {
    fn identity() -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl SqClass for u32 {
    fn identity() -> Self {
        0
    }

    fn times(&self, other: &Self) -> Self {
        self ^ other
    }
}

/// An element `sum n_g <g>` of `Z[G]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RElem<K: SqClass = u32> {
    terms: BTreeMap<K, i64>,
}

impl<K: SqClass> Default for RElem<K> {
    fn default() -> Self {
        RElem { terms: BTreeMap::new() }
    }
}

impl<K: SqClass> RElem<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::class(K::identity())
    }

    /// `<g>`
    pub fn class(g: K) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(g, 1);
        RElem { terms }
    }

    /// `<<g>> = <g> - 1`
    pub fn pfister(g: K) -> Self {
        Self::class(g).sub(&Self::one())
    }

    pub fn integer(n: i64) -> Self {
        Self::one().scale(n)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, i64)>) -> Self {
        let mut r = Self::zero();
        for (g, n) in terms {
            r.add_term(g, n);
        }
        r
    }

    pub fn add_term(&mut self, g: K, n: i64) {
        if n == 0 {
            return;
        }
        let e = self.terms.entry(g.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &K) -> i64 {
        self.terms.get(g).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (g, n) in &other.terms {
            r.add_term(g.clone(), *n);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, n: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        RElem { terms: self.terms.iter().map(|(g, c)| (g.clone(), c * n)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                r.add_term(g.times(h), a * b);
            }
        }
        r
    }

    /// Multiplication by `<h>`.
    pub fn shift(&self, h: &K) -> Self {
        RElem { terms: self.terms.iter().map(|(g, c)| (g.times(h), *c)).collect() }
    }

    /// Augmentation `sum n_g`.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Applies a map on classes, e.g. reduction of rational classes.
    pub fn map_classes<L: SqClass>(&self, f: impl Fn(&K) -> L) -> RElem<L> {
        RElem::from_terms(self.terms.iter().map(|(g, c)| (f(g), *c)))
    }
}

impl RElem<u32> {
    /// Coefficient vector indexed by bitmask.
    pub fn to_dense(&self, rank: u32) -> Vec<i64> {
        let mut v = vec![0; 1 << rank];
        for (g, c) in &self.terms {
            v[*g as usize] += c;
        }
        v
    }

    pub fn from_dense(v: &[i64]) -> Self {
        RElem::from_terms(v.iter().enumerate().map(|(g, &c)| (g as u32, c)))
    }

    /// `p_g^+ = <g> + 1`
    pub fn p_plus(g: u32) -> Self {
        Self::class(g).add(&Self::one())
    }

    /// `p_g^- = <g> - 1`
    pub fn p_minus(g: u32) -> Self {
        Self::pfister(g)
    }
}

/// A character `G -> {±1}` given by an `F_2`-linear functional mask.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Character {
    pub mask: u32,
}

impl Character {
    pub fn trivial() -> Self {
        Character { mask: 0 }
    }

    pub fn eval(&self, g: u32) -> i64 {
        if (self.mask & g).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All characters of `F_2^rank`.
    pub fn all(rank: u32) -> Vec<Character> {
        (0..1u32 << rank).map(|mask| Character { mask }).collect()
    }

    /// The character on `R_A` applied to a group-ring element.
    pub fn apply(&self, r: &RElem<u32>) -> i64 {
        r.terms().map(|(g, c)| self.eval(*g) * c).sum()
    }
}

/// A finitely presented `Z[G]`-module, `G = F_2^rank`.
///
/// Flattened to a `Z`-basis `(g, e)` with index `g * ngens + e`; the
/// flattened relations are all `G`-translates of the module relations.
#[derive(Clone, Debug)]
pub struct RModPres {
    rank: u32,
    ngens: usize,
    relations: Vec<Vec<(usize, RElem<u32>)>>,
    flat: FpAb,
}

impl RModPres {
    pub fn new(rank: u32, ngens: usize, relations: Vec<Vec<(usize, RElem<u32>)>>) -> RModPres {
        let n = (1usize << rank) * ngens;
        let mut m = IntMat::zeros(0, n);
        for rel in &relations {
            for h in 0..1u32 << rank {
                let mut row = Vec::new();
                for (e, r) in rel {
                    for (g, c) in r.terms() {
                        row.push(((g ^ h) as usize * ngens + e, BigInt::from(*c)));
                    }
                }
                m.push_row(row);
            }
        }
        let flat = FpAb::new(n, m).expect("shape");
        RModPres { rank, ngens, relations, flat }
    }

    /// The free module of rank one, `Z[G]` itself.
    pub fn regular(rank: u32) -> RModPres {
        RModPres::new(rank, 1, Vec::new())
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn group_order(&self) -> usize {
        1 << self.rank
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Vec<(usize, RElem<u32>)>] {
        &self.relations
    }

    pub fn flat(&self) -> &FpAb {
        &self.flat
    }

    pub fn index(&self, g: u32, e: usize) -> usize {
        g as usize * self.ngens + e
    }

    /// Flattened vector of `sum r_e [e]`.
    pub fn vector(&self, elem: &[(usize, RElem<u32>)]) -> SparseRow {
        let mut row = Vec::new();
        for (e, r) in elem {
            for (g, c) in r.terms() {
                row.push((self.index(*g, *e), BigInt::from(*c)));
            }
        }
        normalize(row)
    }

    /// `<h> * v`
    pub fn act(&self, h: u32, v: &[(usize, BigInt)]) -> SparseRow {
        let row = v
            .iter()
            .map(|(i, c)| {
                let (g, e) = (i / self.ngens, i % self.ngens);
                (self.index(g as u32 ^ h, e), c.clone())
            })
            .collect();
        normalize(row)
    }

    /// `r * v`
    pub fn mul(&self, r: &RElem<u32>, v: &[(usize, BigInt)]) -> SparseRow {
        let mut out = Vec::new();
        for (h, c) in r.terms() {
            for (i, x) in self.act(*h, v) {
                out.push((i, x * BigInt::from(*c)));
            }
        }
        normalize(out)
    }

    /// Multiplication by `r` as an endomorphism of the flattened group.
    pub fn mul_map(&self, r: &RElem<u32>) -> AbMap {
        let n = self.flat.ngens();
        let mut m = IntMat::zeros(0, n);
        for i in 0..n {
            m.push_row(self.mul(r, &[(i, BigInt::from(1))]));
        }
        AbMap::new(self.flat.clone(), self.flat.clone(), m).expect("module endomorphism")
    }

    /// `r * M`.
    pub fn image_of(&self, r: &RElem<u32>) -> Subgroup {
        self.mul_map(r).image()
    }

    /// `p_g^+ M`, which is `e_g^+ M` after inverting 2.
    pub fn plus_part(&self, g: u32) -> Subgroup {
        self.image_of(&RElem::p_plus(g))
    }

    /// `p_g^- M`.
    pub fn minus_part(&self, g: u32) -> Subgroup {
        self.image_of(&RElem::p_minus(g))
    }

    /// The module with `G` acting through `g -> chi(g) g`.
    pub fn twist(&self, chi: Character) -> RModPres {
        let rels = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|(e, r)| {
                        let t = RElem::from_terms(r.terms().map(|(g, c)| (*g, c * chi.eval(*g))));
                        (*e, t)
                    })
                    .collect()
            })
            .collect();
        RModPres::new(self.rank, self.ngens, rels)
    }

    /// `M_chi = M / <(g - chi(g)) x>` as an abelian group.
    pub fn chi_localize(&self, chi: Character) -> FpAb {
        let mut gens = Vec::new();
        for b in 0..self.rank {
            let g = 1u32 << b;
            let r = RElem::class(g).sub(&RElem::integer(chi.eval(g)));
            for i in 0..self.flat.ngens() {
                gens.push(self.mul(&r, &[(i, BigInt::from(1))]));
            }
        }
        self.flat.quotient(&gens)
    }

    /// `R`-submodule generated by the given flattened vectors.
    pub fn submodule(&self, gens: &[SparseRow]) -> Subgroup {
        self.flat.subgroup(&self.translates(gens))
    }

    /// All `G`-translates of the given vectors.
    pub fn translates(&self, gens: &[SparseRow]) -> Vec<SparseRow> {
        let mut all = Vec::with_capacity(gens.len() << self.rank);
        for v in gens {
            for h in 0..1u32 << self.rank {
                all.push(self.act(h, v));
            }
        }
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pfister_square() {
        // <<a>>^2 = -2 <<a>> for an element of order two
        let a = RElem::<u32>::pfister(1);
        assert_eq!(a.mul(&a), a.scale(-2));
    }

    #[test]
    fn characters() {
        let chi = Character { mask: 0b11 };
        assert_eq!(chi.eval(0b01), -1);
        assert_eq!(chi.eval(0b11), 1);
        assert_eq!(chi.apply(&RElem::pfister(1)), -2);
    }

    #[test]
    fn regular_module_localizations() {
        let m = RModPres::regular(1);
        assert_eq!(m.flat().free_rank(), 2);
        for chi in Character::all(1) {
            let l = m.chi_localize(chi);
            assert_eq!(l.free_rank(), 1);
            assert!(l.invariant_factors().is_empty());
        }
        // Z[G]/(<a> - 1) twisted by the sign character
        let triv = RModPres::new(1, 1, vec![vec![(0, RElem::pfister(1))]]);
        let sign = Character { mask: 1 };
        assert_eq!(triv.chi_localize(sign).invariant_factors(), vec![BigInt::from(2)]);
        let tw = triv.twist(sign);
        assert!(tw.chi_localize(sign).invariant_factors().is_empty());
        assert_eq!(tw.chi_localize(sign).free_rank(), 1);
    }

    #[test]
    fn plus_part_of_regular() {
        let m = RModPres::regular(1);
        let p = m.plus_part(1);
        assert_eq!(p.group.free_rank(), 1);
        let v = m.vector(&[(0, RElem::pfister(1))]);
        assert!(m.mul(&RElem::p_plus(1), &v).is_empty());
    }

    proptest! {
        #[test]
        fn ring_axioms(a in prop::collection::vec(-5i64..5, 4), b in prop::collection::vec(-5i64..5, 4), c in prop::collection::vec(-5i64..5, 4)) {
            let (a, b, c) = (RElem::from_dense(&a), RElem::from_dense(&b), RElem::from_dense(&c));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).augmentation(), a.augmentation() * b.augmentation());
            for chi in Character::all(2) {
                prop_assert_eq!(chi.apply(&a.mul(&b)), chi.apply(&a) * chi.apply(&b));
            }
        }
    }
}
