//! The coinvariant bottom row `Z[G]Z_2 -> Z[G]Z_1 -> Z[G] -> Z`, its homology,
//! and brute-force orbit censuses of tuples of points of `P^1(k)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::group_ring::RElem;
use crate::linalg::{normalize, AbMap, FpAb, IntMat, LinalgError, SparseRow};
use crate::ring::{RingElem, RingHandle};
use crate::scissors::{admissible_pairs, y_relation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("W is empty for {0}")]
    RingTooSmall(String),
    #[error("{0} is not a field")]
    NotAField(String),
    #[error("field of order {0} is too large for enumeration")]
    TooLarge(u64),
    #[error("unsupported tuple length {0}")]
    TupleLength(usize),
    #[error("homology position must be 1, 2 or 3, got {0}")]
    Position(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The row complex with `d4: Z[G]Z_2 -> Z[G]Z_1`, `d3: Z[G]Z_1 -> Z[G]`, `d2: Z[G] -> Z`.
#[derive(Clone, Debug)]
pub struct RowComplex {
    pub ring: RingHandle,
    pub rank: u32,
    pub w: Vec<RingElem>,
    pub pairs: Vec<(RingElem, RingElem)>,
    pub d4: IntMat,
    pub d3: IntMat,
    pub d2: IntMat,
}

fn relem_row(r: &RElem) -> SparseRow {
    normalize(r.terms().map(|(g, c)| (*g as usize, BigInt::from(*c))).collect())
}

pub fn build_row_complex(r: &RingHandle) -> Result<RowComplex, OrbitError> {
    if r.w().is_empty() {
        return Err(OrbitError::RingTooSmall(r.descriptor()));
    }
    let rank = r.square_classes().rank;
    let ng = 1usize << rank;
    let w = r.w().to_vec();
    let nw = w.len();
    let mut wpos = vec![usize::MAX; r.size() as usize];
    for (i, a) in w.iter().enumerate() {
        wpos[a.0 as usize] = i;
    }
    let pairs = admissible_pairs(r);
    let mut d4 = IntMat::zeros(0, ng * nw);
    for h in 0..ng as u32 {
        for &(a, b) in &pairs {
            let y = y_relation(r, a, b);
            let row = y
                .terms()
                .map(|((g, s), c)| ((g ^ h) as usize * nw + wpos[s.0 as usize], BigInt::from(*c)))
                .collect();
            d4.push_row(row);
        }
    }
    let one = r.one();
    let mut d3 = IntMat::zeros(0, ng);
    for h in 0..ng as u32 {
        for &x in &w {
            let e = RElem::pfister(r.class_of(x)).mul(&RElem::pfister(r.class_of(r.sub(one, x))));
            d3.push_row(relem_row(&e.shift(&h)));
        }
    }
    let mut d2 = IntMat::zeros(0, 1);
    for _ in 0..ng {
        d2.push_row(vec![(0, BigInt::one())]);
    }
    Ok(RowComplex { ring: r.clone(), rank, w, pairs, d4, d3, d2 })
}

impl RowComplex {
    /// `d3 ∘ d4 = 0` and `d2 ∘ d3 = 0` as integer matrices.
    pub fn is_complex(&self) -> bool {
        self.d4.mul(&self.d3).map(|m| m.is_zero()).unwrap_or(false)
            && self.d3.mul(&self.d2).map(|m| m.is_zero()).unwrap_or(false)
    }

    /// Homology at `Z` (1), `Z[G]` (2) or `Z[G]Z_1` (3).
    pub fn homology_at(&self, position: usize) -> Result<FpAb, OrbitError> {
        let (incoming, outgoing) = match position {
            1 => (&self.d2, None),
            2 => (&self.d3, Some(&self.d2)),
            3 => (&self.d4, Some(&self.d3)),
            p => return Err(OrbitError::Position(p)),
        };
        let m = FpAb::new(incoming.ncols(), incoming.clone())?;
        match outgoing {
            None => Ok(m),
            Some(d) => {
                let f = AbMap::new(m, FpAb::free(d.ncols()), d.clone())?;
                Ok(f.kernel().group)
            }
        }
    }
}

/// One `SL_2(k)`-orbit of tuples of distinct points of `P^1(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRep {
    /// point indices: `x` for `[x:1]`, `q` for `[1:0]`
    pub points: Vec<u32>,
    /// square class of `d12 d13 d23`
    pub class: u32,
    /// cross-ratio `d13 d24 / (d14 d23)` for tuples of length at least 4
    pub x: Option<RingElem>,
    /// cross-ratio `d13 d25 / (d15 d23)` for tuples of length 5
    pub y: Option<RingElem>,
}

#[derive(Clone, Debug)]
pub struct OrbitCensus {
    pub q: u64,
    pub tuple_len: usize,
    pub orbits: Vec<OrbitRep>,
    /// `|G_k|`, `|G_k||W_k|` or `|G_k||{(x,y): x, y, x/y in W}|`
    pub expected: usize,
    /// distinct orbits carry distinct labels, all in the predicted parameter set
    pub labels_match: bool,
}

struct Projective<'a> {
    k: &'a RingHandle,
    q: u32,
}

impl Projective<'_> {
    fn vector(&self, i: u32) -> (RingElem, RingElem) {
        if i == self.q {
            (self.k.one(), self.k.zero())
        } else {
            (RingElem(i), self.k.one())
        }
    }

    fn point(&self, v: (RingElem, RingElem)) -> u32 {
        if v.1 == self.k.zero() {
            self.q
        } else {
            self.k.div(v.0, v.1).expect("unit").0
        }
    }

    fn det(&self, i: u32, j: u32) -> RingElem {
        let (a, b) = (self.vector(i), self.vector(j));
        self.k.sub(self.k.mul(a.0, b.1), self.k.mul(a.1, b.0))
    }

    fn apply(&self, m: &[RingElem; 4], i: u32) -> u32 {
        let k = self.k;
        let (x, y) = self.vector(i);
        let v = (k.add(k.mul(m[0], x), k.mul(m[1], y)), k.add(k.mul(m[2], x), k.mul(m[3], y)));
        self.point(v)
    }
}

/// All of `SL_2(k)` as `[a, b, c, d]`.
pub fn sl2_elements(k: &RingHandle) -> Vec<[RingElem; 4]> {
    let els: Vec<RingElem> = k.elements().collect();
    let mut out = Vec::new();
    for &a in &els {
        for &b in &els {
            for &c in &els {
                let bc1 = k.add(k.mul(b, c), k.one());
                if a == k.zero() {
                    if bc1 == k.zero() {
                        for &d in &els {
                            out.push([a, b, c, d]);
                        }
                    }
                } else {
                    out.push([a, b, c, k.div(bc1, a).expect("unit")]);
                }
            }
        }
    }
    out
}

/// Orbits of `SL_2(k)` on ordered tuples of distinct points, by exhaustive marking.
pub fn orbit_classify(k: &RingHandle, tuple_len: usize) -> Result<OrbitCensus, OrbitError> {
    if !k.is_field() {
        return Err(OrbitError::NotAField(k.descriptor()));
    }
    let q = k.size();
    if q > 31 {
        return Err(OrbitError::TooLarge(q));
    }
    if !(3..=5).contains(&tuple_len) {
        return Err(OrbitError::TupleLength(tuple_len));
    }
    let pr = Projective { k, q: q as u32 };
    let base = q as usize + 1;
    let total = base.pow(tuple_len as u32);
    let mut seen = vec![false; total];
    let group = sl2_elements(k);
    let encode = |t: &[u32]| t.iter().fold(0usize, |acc, &x| acc * base + x as usize);
    let mut orbits = Vec::new();
    let mut t = vec![0u32; tuple_len];
    for idx in 0..total {
        let mut r = idx;
        for s in (0..tuple_len).rev() {
            t[s] = (r % base) as u32;
            r /= base;
        }
        let distinct = (0..tuple_len).all(|i| (i + 1..tuple_len).all(|j| t[i] != t[j]));
        if !distinct || seen[idx] {
            continue;
        }
        for m in &group {
            let img: Vec<u32> = t.iter().map(|&p| pr.apply(m, p)).collect();
            seen[encode(&img)] = true;
        }
        orbits.push(label(k, &pr, &t));
    }
    let g = k.square_classes().order();
    let w = k.w().len();
    let expected = match tuple_len {
        3 => g,
        4 => g * w,
        _ => g * admissible_pairs(k).len(),
    };
    let labels: BTreeSet<(u32, Option<RingElem>, Option<RingElem>)> =
        orbits.iter().map(|o| (o.class, o.x, o.y)).collect();
    let in_range = orbits.iter().all(|o| {
        o.x.is_none_or(|x| k.in_w(x))
            && o.y.is_none_or(|y| k.in_w(y))
            && match (o.x, o.y) {
                (Some(x), Some(y)) => k.in_w(k.div(x, y).expect("unit")),
                _ => true,
            }
    });
    let labels_match = labels.len() == orbits.len() && in_range;
    Ok(OrbitCensus { q, tuple_len, orbits, expected, labels_match })
}

fn label(k: &RingHandle, pr: &Projective<'_>, t: &[u32]) -> OrbitRep {
    let d = |i: usize, j: usize| pr.det(t[i], t[j]);
    let class = k.class_of(k.mul(k.mul(d(0, 1), d(0, 2)), d(1, 2)));
    let cross = |j: usize| k.div(k.mul(d(0, 2), d(1, j)), k.mul(d(0, j), d(1, 2))).expect("unit");
    OrbitRep {
        points: t.to_vec(),
        class,
        x: (t.len() >= 4).then(|| cross(3)),
        y: (t.len() >= 5).then(|| cross(4)),
    }
}

/// Reduced homology in degrees `1..=max_degree` of the complex of injective
/// words on `P^1(k)` (degree `n` spanned by `(n+1)`-tuples of distinct points).
pub fn injective_word_homology(k: &RingHandle, max_degree: usize) -> Result<Vec<FpAb>, OrbitError> {
    if !k.is_field() {
        return Err(OrbitError::NotAField(k.descriptor()));
    }
    let q = k.size();
    if q > 9 {
        return Err(OrbitError::TooLarge(q));
    }
    let npts = q as u32 + 1;
    // tuples[n] lists the words of length n
    let mut tuples: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new()]];
    for len in 1..=max_degree + 2 {
        let mut next = Vec::new();
        for t in &tuples[len - 1] {
            for p in 0..npts {
                if !t.contains(&p) {
                    let mut u = t.clone();
                    u.push(p);
                    next.push(u);
                }
            }
        }
        tuples.push(next);
    }
    let index: Vec<std::collections::HashMap<Vec<u32>, usize>> = tuples
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
        .collect();
    // boundary from words of length len to length len - 1
    let boundary = |len: usize| -> IntMat {
        let mut m = IntMat::zeros(0, tuples[len - 1].len());
        for t in &tuples[len] {
            let row = (0..len)
                .map(|i| {
                    let mut f = t.clone();
                    f.remove(i);
                    let s = if i % 2 == 0 { 1 } else { -1 };
                    (index[len - 1][&f], BigInt::from(s))
                })
                .collect();
            m.push_row(row);
        }
        m
    };
    let coker = |len: usize| FpAb::new(tuples[len - 1].len(), boundary(len)).expect("shape");
    let mut out = Vec::new();
    // degree n: H_n = tors coker(d from len n+2) + Z^(free - rank of d from len n+1)
    let mut prev = coker(2);
    for n in 1..=max_degree {
        let rank_out = tuples[n].len() - prev.free_rank();
        let c = coker(n + 2);
        let free = c.free_rank() - rank_out;
        out.push(FpAb::from_invariants(&c.invariant_factors(), free));
        prev = c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::iso_odd;
    use crate::scissors::ScissorsContext;
    use crate::witt::fundamental_ideal;

    fn ring(d: &str) -> RingHandle {
        RingHandle::parse(d).unwrap()
    }

    #[test]
    fn gf7_complex() {
        let c = build_row_complex(&ring("gf(7)")).unwrap();
        assert_eq!(c.d3.nrows(), 10);
        assert!(c.is_complex());
        assert!(c.homology_at(1).unwrap().is_trivial());
        assert_eq!(c.homology_at(2).unwrap().structure(), "Z/2");
        assert!(crate::linalg::iso(&c.homology_at(2).unwrap(), &fundamental_ideal(&ring("gf(7)")).unwrap()));
    }

    #[test]
    fn gf11_position3() {
        let r = ring("gf(11)");
        let c = build_row_complex(&r).unwrap();
        assert!(c.is_complex());
        let s = ScissorsContext::new(&r).unwrap();
        assert!(iso_odd(&c.homology_at(3).unwrap(), s.rp1()));
        assert!(c.homology_at(4).is_err());
    }

    #[test]
    fn censuses() {
        let o = orbit_classify(&ring("gf(7)"), 3).unwrap();
        assert_eq!((o.orbits.len(), o.expected), (2, 2));
        let o = orbit_classify(&ring("gf(5)"), 4).unwrap();
        assert_eq!((o.orbits.len(), o.expected), (6, 6));
        assert!(o.labels_match);
        let o = orbit_classify(&ring("gf(4)"), 3).unwrap();
        assert_eq!(o.orbits.len(), 1);
        let o = orbit_classify(&ring("gf(7)"), 5).unwrap();
        assert_eq!(o.orbits.len(), o.expected);
        assert!(o.labels_match);
        assert!(orbit_classify(&ring("gf(37)"), 3).is_err());
    }

    #[test]
    fn sl2_order() {
        assert_eq!(sl2_elements(&ring("gf(5)")).len(), 120);
        assert_eq!(sl2_elements(&ring("gf(4)")).len(), 60);
    }

    #[test]
    fn injective_words_acyclic() {
        for d in ["gf(4)", "gf(5)"] {
            let h = injective_word_homology(&ring(d), 3).unwrap();
            assert!(h.iter().all(|g| g.is_trivial()), "{d}");
        }
    }
}
