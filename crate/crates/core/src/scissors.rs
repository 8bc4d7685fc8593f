//! Scissors congruence groups of a finite local ring: `P`, `B`, `RP`, `RP_1`,
//! `RB`, the special elements and the quotients by the `K` submodules.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::group_ring::{RElem, RModPres, SqClass};
use crate::linalg::{iso_odd, normalize, AbMap, FpAb, IntMat, LinalgError, SparseRow, Subgroup};
use crate::ring::{RingElem, RingHandle, UnitGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScissorsError {
    #[error("ring too small: {0}")]
    RingTooSmall(String),
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("{0} is a field")]
    IsField(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A formal combination `sum n_a [a]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PBElem<E: Ord + Clone = RingElem> {
    terms: BTreeMap<E, i64>,
}

impl<E: Ord + Clone> Default for PBElem<E> {
    fn default() -> Self {
        PBElem { terms: BTreeMap::new() }
    }
}

impl<E: Ord + Clone> PBElem<E> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `[a]`
    pub fn sym(a: E) -> Self {
        let mut x = Self::zero();
        x.add_term(a, 1);
        x
    }

    pub fn add_term(&mut self, a: E, n: i64) {
        if n == 0 {
            return;
        }
        let e = self.terms.entry(a.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&a);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, &i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (a, n) in &other.terms {
            r.add_term(a.clone(), *n);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, n: i64) -> Self {
        let mut r = Self::zero();
        for (a, c) in &self.terms {
            r.add_term(a.clone(), c * n);
        }
        r
    }
}

/// A formal combination `sum n <g>[a]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RPElem<K: SqClass = u32, E: Ord + Clone = RingElem> {
    terms: BTreeMap<(K, E), i64>,
}

impl<K: SqClass, E: Ord + Clone> Default for RPElem<K, E> {
    fn default() -> Self {
        RPElem { terms: BTreeMap::new() }
    }
}

impl<K: SqClass, E: Ord + Clone> RPElem<K, E> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `[a]`
    pub fn sym(a: E) -> Self {
        Self::term(K::identity(), a)
    }

    /// `<g>[a]`
    pub fn term(g: K, a: E) -> Self {
        let mut x = Self::zero();
        x.add_term(g, a, 1);
        x
    }

    pub fn add_term(&mut self, g: K, a: E, n: i64) {
        if n == 0 {
            return;
        }
        let key = (g, a);
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += n;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(K, E), &i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for ((g, a), n) in &other.terms {
            r.add_term(g.clone(), a.clone(), *n);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, n: i64) -> Self {
        let mut r = Self::zero();
        for ((g, a), c) in &self.terms {
            r.add_term(g.clone(), a.clone(), c * n);
        }
        r
    }

    /// Left multiplication by a group-ring element.
    pub fn act(&self, r: &RElem<K>) -> Self {
        let mut out = Self::zero();
        for (h, c) in r.terms() {
            for ((g, a), n) in &self.terms {
                out.add_term(g.times(h), a.clone(), c * n);
            }
        }
        out
    }

    /// Image under `<g>[a] -> [a]`.
    pub fn forget(&self) -> PBElem<E> {
        let mut out = PBElem::zero();
        for ((_, a), n) in &self.terms {
            out.add_term(a.clone(), *n);
        }
        out
    }
}

/// `S^2_Z(A^x)`: the tensor square of the unit group modulo `x⊗y + y⊗x`.
#[derive(Clone, Debug)]
pub struct SymSquare {
    pub group: FpAb,
    units: UnitGroup,
    n: usize,
}

impl SymSquare {
    pub fn new(units: UnitGroup) -> SymSquare {
        let n = units.gens.len();
        let mut rels = IntMat::zeros(0, n * n);
        for rho in units.group.relations().rows() {
            for j in 0..n {
                rels.push_row(rho.iter().map(|(i, c)| (i * n + j, c.clone())).collect());
                rels.push_row(rho.iter().map(|(i, c)| (j * n + i, c.clone())).collect());
            }
        }
        for i in 0..n {
            for j in i..n {
                rels.push_row(vec![(i * n + j, BigInt::one()), (j * n + i, BigInt::one())]);
            }
        }
        let group = FpAb::new(n * n, rels).expect("shape");
        SymSquare { group, units, n }
    }

    /// `x ⊗ y` as a word in the tensor basis.
    pub fn tensor(&self, x: RingElem, y: RingElem) -> SparseRow {
        let (lx, ly) = (self.units.log(x), self.units.log(y));
        let mut row = Vec::new();
        for i in 0..self.n {
            if lx[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if ly[j] != 0 {
                    row.push((i * self.n + j, BigInt::from(lx[i] * ly[j])));
                }
            }
        }
        normalize(row)
    }
}

/// Ordered pairs `(a, b)` with `a, b, a/b` in `W`, lexicographic.
pub fn admissible_pairs(r: &RingHandle) -> Vec<(RingElem, RingElem)> {
    let mut out = Vec::new();
    for &a in r.w() {
        for &b in r.w() {
            if let Some(q) = r.div(a, b) {
                if r.in_w(q) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

fn five(r: &RingHandle, a: RingElem, b: RingElem) -> [RingElem; 5] {
    let one = r.one();
    let (ai, bi) = (r.inv(a).expect("unit"), r.inv(b).expect("unit"));
    let s3 = r.mul(b, ai);
    let s4 = r.div(r.sub(one, ai), r.sub(one, bi)).expect("unit");
    let s5 = r.div(r.sub(one, a), r.sub(one, b)).expect("unit");
    [a, b, s3, s4, s5]
}

/// `X_{a,b} = [a] - [b] + [b/a] - [(1-a^-1)/(1-b^-1)] + [(1-a)/(1-b)]`
pub fn x_relation(r: &RingHandle, a: RingElem, b: RingElem) -> PBElem {
    let [s1, s2, s3, s4, s5] = five(r, a, b);
    let mut x = PBElem::sym(s1);
    x.add_term(s2, -1);
    x.add_term(s3, 1);
    x.add_term(s4, -1);
    x.add_term(s5, 1);
    x
}

/// `Y_{a,b} = [a] - [b] + <a>[b/a] - <a^-1 - 1>[(1-a^-1)/(1-b^-1)] + <1-a>[(1-a)/(1-b)]`
pub fn y_relation(r: &RingHandle, a: RingElem, b: RingElem) -> RPElem {
    let [s1, s2, s3, s4, s5] = five(r, a, b);
    let one = r.one();
    let ai = r.inv(a).expect("unit");
    let mut y = RPElem::sym(s1);
    y.add_term(0, s2, -1);
    y.add_term(r.class_of(a), s3, 1);
    y.add_term(r.class_of(r.sub(ai, one)), s4, -1);
    y.add_term(r.class_of(r.sub(one, a)), s5, 1);
    y
}

/// Quotients by `K_A` and `K_A^(1)`, with the induced maps.
#[derive(Clone, Debug)]
pub struct TildeBundle {
    /// `P / K`
    pub p: FpAb,
    /// `RP / K^(1)` on the flattened generators of `RP`
    pub rp: FpAb,
    /// `Z[G] / p_{-1}^+ I`
    pub lambda1_target: FpAb,
    pub lambda1: AbMap,
    pub rp1: Subgroup,
    /// `S^2 / <(-a)⊗a>`
    pub s2: FpAb,
    pub lambda2: AbMap,
    pub rb: Subgroup,
}

/// `RP'` and its comparison map into the odd torsion of `RP`.
#[derive(Clone, Debug)]
pub struct RpPrime {
    pub module: RModPres,
    /// `[a]' -> g(a) / 2` into `RP` with 2-primary torsion killed
    pub map: AbMap,
    /// image of the map equals the odd torsion of `RP` and the kernel is a 2-group
    pub is_odd_iso: bool,
}

/// The submodule `L_B` and the comparison with the residue field.
#[derive(Clone, Debug)]
pub struct LCheck {
    pub l: Subgroup,
    /// `R~P(B) / L_B`
    pub quotient: FpAb,
    /// `R~P(k)`
    pub residue: FpAb,
    /// reduction map `R~P(B)/L_B -> R~P(k)`
    pub map: Option<AbMap>,
    pub map_is_iso: bool,
    pub same_invariants: bool,
}

/// Presentations attached to one ring, built on first use.
#[derive(Debug)]
pub struct ScissorsContext {
    ring: RingHandle,
    w: Vec<RingElem>,
    wpos: Vec<usize>,
    rank: u32,
    p: OnceLock<FpAb>,
    rp: OnceLock<RModPres>,
    s2: OnceLock<SymSquare>,
    lambda: OnceLock<AbMap>,
    lambda1: OnceLock<AbMap>,
    lambda2: OnceLock<AbMap>,
    rp1: OnceLock<Subgroup>,
    rb: OnceLock<Subgroup>,
    bloch: OnceLock<Subgroup>,
    i_group: OnceLock<FpAb>,
}

impl ScissorsContext {
    /// Requires a residue field with more than three elements.
    pub fn new(ring: &RingHandle) -> Result<ScissorsContext, ScissorsError> {
        if ring.residue_order() <= 3 {
            return Err(ScissorsError::RingTooSmall(format!(
                "{} has residue field of order {}",
                ring.descriptor(),
                ring.residue_order()
            )));
        }
        let w = ring.w().to_vec();
        let mut wpos = vec![usize::MAX; ring.size() as usize];
        for (i, a) in w.iter().enumerate() {
            wpos[a.0 as usize] = i;
        }
        Ok(ScissorsContext {
            ring: ring.clone(),
            w,
            wpos,
            rank: ring.square_classes().rank,
            p: OnceLock::new(),
            rp: OnceLock::new(),
            s2: OnceLock::new(),
            lambda: OnceLock::new(),
            lambda1: OnceLock::new(),
            lambda2: OnceLock::new(),
            rp1: OnceLock::new(),
            rb: OnceLock::new(),
            bloch: OnceLock::new(),
            i_group: OnceLock::new(),
        })
    }

    pub fn ring(&self) -> &RingHandle {
        &self.ring
    }

    pub fn w(&self) -> &[RingElem] {
        &self.w
    }

    /// Rank of `G_A` over `F_2`.
    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Position of `a` among the generators `[a]`.
    pub fn w_index(&self, a: RingElem) -> Option<usize> {
        match self.wpos[a.0 as usize] {
            usize::MAX => None,
            i => Some(i),
        }
    }

    fn wi(&self, a: RingElem) -> usize {
        self.w_index(a).unwrap_or_else(|| panic!("{} is not in W", self.ring.format(a)))
    }

    /// The base point used for `C`, `c` and cocycle extensions.
    pub fn base_point(&self) -> RingElem {
        self.w[0]
    }

    pub fn class(&self, a: RingElem) -> u32 {
        self.ring.class_of(a)
    }

    fn inv(&self, a: RingElem) -> RingElem {
        self.ring.inv(a).expect("unit")
    }

    fn one_minus(&self, a: RingElem) -> RingElem {
        self.ring.sub(self.ring.one(), a)
    }

    pub fn minus_one(&self) -> RingElem {
        self.ring.neg(self.ring.one())
    }

    /// Ordered pairs `(a, b)` with `a, b, a/b` in `W`, lexicographic.
    pub fn pairs(&self) -> Vec<(RingElem, RingElem)> {
        admissible_pairs(&self.ring)
    }

    pub fn x_rel(&self, a: RingElem, b: RingElem) -> PBElem {
        x_relation(&self.ring, a, b)
    }

    pub fn y_rel(&self, a: RingElem, b: RingElem) -> RPElem {
        y_relation(&self.ring, a, b)
    }

    pub fn p_vector(&self, x: &PBElem) -> SparseRow {
        normalize(x.terms().map(|(a, n)| (self.wi(*a), BigInt::from(*n))).collect())
    }

    pub fn rp_vector(&self, x: &RPElem) -> SparseRow {
        let n = self.w.len();
        normalize(
            x.terms()
                .map(|((g, a), c)| (*g as usize * n + self.wi(*a), BigInt::from(*c)))
                .collect(),
        )
    }

    /// `P(A)`: one generator per element of `W`, one relation per admissible pair.
    pub fn pre_bloch(&self) -> &FpAb {
        self.p.get_or_init(|| {
            let mut m = IntMat::zeros(0, self.w.len());
            for (a, b) in self.pairs() {
                m.push_row(self.p_vector(&self.x_rel(a, b)));
            }
            FpAb::new(self.w.len(), m).expect("shape")
        })
    }

    /// `RP(A)` over `Z[G_A]`.
    pub fn refined(&self) -> &RModPres {
        self.rp.get_or_init(|| {
            let rels = self
                .pairs()
                .into_iter()
                .map(|(a, b)| {
                    let y = self.y_rel(a, b);
                    let mut by_gen: BTreeMap<usize, RElem> = BTreeMap::new();
                    for ((g, s), c) in y.terms() {
                        by_gen.entry(self.wi(*s)).or_default().add_term(*g, *c);
                    }
                    by_gen.into_iter().filter(|(_, r)| !r.is_zero()).collect()
                })
                .collect();
            RModPres::new(self.rank, self.w.len(), rels)
        })
    }

    pub fn s2(&self) -> &SymSquare {
        self.s2.get_or_init(|| SymSquare::new(self.ring.unit_group()))
    }

    pub fn s2_of_units(&self) -> &FpAb {
        &self.s2().group
    }

    /// `λ: P -> S^2`, `[a] -> a ⊗ (1-a)`.
    pub fn lambda_map(&self) -> &AbMap {
        self.lambda.get_or_init(|| {
            let s2 = self.s2();
            let mut m = IntMat::zeros(0, s2.group.ngens());
            for &a in &self.w {
                m.push_row(s2.tensor(a, self.one_minus(a)));
            }
            AbMap::new(self.pre_bloch().clone(), s2.group.clone(), m).expect("λ kills X")
        })
    }

    /// `B(A) = ker λ`.
    pub fn bloch(&self) -> &FpAb {
        &self.bloch.get_or_init(|| self.lambda_map().kernel()).group
    }

    /// `Z[G_A]` as a free abelian group on the class masks.
    pub fn group_ring_free(&self) -> &FpAb {
        self.i_group.get_or_init(|| FpAb::free(1 << self.rank))
    }

    /// `λ_1(<g>[a]) = <g><<a>><<1-a>>`.
    pub fn lambda1_elem(&self, a: RingElem) -> RElem {
        RElem::pfister(self.class(a)).mul(&RElem::pfister(self.class(self.one_minus(a))))
    }

    /// `λ_1` applied to a formal element.
    pub fn lambda1_of(&self, x: &RPElem) -> RElem {
        let mut out = RElem::zero();
        for ((g, a), c) in x.terms() {
            out = out.add(&self.lambda1_elem(*a).shift(g).scale(*c));
        }
        out
    }

    fn relem_row(r: &RElem) -> SparseRow {
        normalize(r.terms().map(|(g, c)| (*g as usize, BigInt::from(*c))).collect())
    }

    pub fn lambda1(&self) -> &AbMap {
        self.lambda1.get_or_init(|| {
            let rp = self.refined();
            let mut m = IntMat::zeros(0, 1 << self.rank);
            for g in 0..1u32 << self.rank {
                for &a in &self.w {
                    m.push_row(Self::relem_row(&self.lambda1_elem(a).shift(&g)));
                }
            }
            AbMap::new(rp.flat().clone(), self.group_ring_free().clone(), m).expect("λ_1 kills Y")
        })
    }

    /// `λ_2(<g>[a]) = a ⊗ (1-a)`.
    pub fn lambda2(&self) -> &AbMap {
        self.lambda2.get_or_init(|| {
            let s2 = self.s2();
            let mut m = IntMat::zeros(0, s2.group.ngens());
            for _ in 0..1u32 << self.rank {
                for &a in &self.w {
                    m.push_row(s2.tensor(a, self.one_minus(a)));
                }
            }
            AbMap::new(self.refined().flat().clone(), s2.group.clone(), m).expect("λ_2 kills Y")
        })
    }

    pub fn rp1_sub(&self) -> &Subgroup {
        self.rp1.get_or_init(|| self.lambda1().kernel())
    }

    /// `RP_1(A) = ker λ_1`.
    pub fn rp1(&self) -> &FpAb {
        &self.rp1_sub().group
    }

    pub fn rb_sub(&self) -> &Subgroup {
        self.rb.get_or_init(|| self.lambda2().restrict(self.rp1_sub()).kernel())
    }

    /// `RB(A) = ker(λ_2 | RP_1)`.
    pub fn rb(&self) -> &FpAb {
        &self.rb_sub().group
    }

    pub fn rp_is_zero(&self, x: &RPElem) -> bool {
        self.refined().flat().is_zero(&self.rp_vector(x))
    }

    pub fn p_is_zero(&self, x: &PBElem) -> bool {
        self.pre_bloch().is_zero(&self.p_vector(x))
    }

    pub fn rp_order(&self, x: &RPElem) -> Option<BigInt> {
        self.refined().flat().element_order(&self.rp_vector(x))
    }

    pub fn p_order(&self, x: &PBElem) -> Option<BigInt> {
        self.pre_bloch().element_order(&self.p_vector(x))
    }

    fn check_unit(&self, a: RingElem) -> Result<(), ScissorsError> {
        if self.ring.is_unit(a) {
            Ok(())
        } else {
            Err(ScissorsError::NotUnit(self.ring.format(a)))
        }
    }

    /// For `u` in `U_1`, `f(u) = f(u a) - <u> f(a)` at the base point.
    fn extend(&self, u: RingElem, f: impl Fn(RingElem) -> RPElem) -> RPElem {
        let a = self.base_point();
        let ua = self.ring.mul(u, a);
        f(ua).sub(&f(a).act(&RElem::class(self.class(u))))
    }

    fn psi1_w(&self, a: RingElem) -> RPElem {
        let mut x = RPElem::sym(a);
        x.add_term(self.class(self.minus_one()), self.inv(a), 1);
        x
    }

    fn psi2_w(&self, a: RingElem) -> RPElem {
        let mut x = RPElem::term(self.class(a), a);
        x.add_term(0, self.inv(a), 1);
        x.act(&RElem::class(self.class(self.one_minus(a))))
    }

    /// `ψ_1(a) = [a] + <-1>[a^-1]`
    pub fn psi1(&self, a: RingElem) -> Result<RPElem, ScissorsError> {
        self.check_unit(a)?;
        Ok(if self.w_index(a).is_some() {
            self.psi1_w(a)
        } else {
            self.extend(a, |x| self.psi1_w(x))
        })
    }

    /// `ψ_2(a) = <1-a>(<a>[a] + [a^-1])`
    pub fn psi2(&self, a: RingElem) -> Result<RPElem, ScissorsError> {
        self.check_unit(a)?;
        Ok(if self.w_index(a).is_some() {
            self.psi2_w(a)
        } else {
            self.extend(a, |x| self.psi2_w(x))
        })
    }

    /// `C_A = [a] + <-1>[1-a] + <<1-a>> ψ_1(a)` at a chosen `a` in `W`.
    pub fn big_c_at(&self, a: RingElem) -> RPElem {
        let mut x = RPElem::sym(a);
        x.add_term(self.class(self.minus_one()), self.one_minus(a), 1);
        x.add(&self.psi1_w(a).act(&RElem::pfister(self.class(self.one_minus(a)))))
    }

    pub fn big_c(&self) -> RPElem {
        self.big_c_at(self.base_point())
    }

    /// `g(a) = p_{-1}^+ [a] + <<1-a>> ψ_1(a)`
    pub fn g_gen(&self, a: RingElem) -> RPElem {
        let p = RElem::p_plus(self.class(self.minus_one()));
        RPElem::sym(a)
            .act(&p)
            .add(&self.psi1_w(a).act(&RElem::pfister(self.class(self.one_minus(a)))))
    }

    /// `c_A = [a] + [1-a]`
    pub fn c_const_at(&self, a: RingElem) -> PBElem {
        let mut x = PBElem::sym(a);
        x.add_term(self.one_minus(a), 1);
        x
    }

    pub fn c_const(&self) -> PBElem {
        self.c_const_at(self.base_point())
    }

    /// `{a} = [a] + [a^-1]`
    pub fn brace(&self, a: RingElem) -> PBElem {
        let mut x = PBElem::sym(a);
        x.add_term(self.inv(a), 1);
        x
    }

    /// Generators of `K_A^(1)` (i = 1) or `K_A^(2)` (i = 2) as flattened vectors.
    pub fn k_gens(&self, i: u8) -> Vec<SparseRow> {
        let rp = self.refined();
        let gens: Vec<SparseRow> = self
            .ring
            .units()
            .iter()
            .map(|&a| {
                let x = if i == 1 { self.psi1(a) } else { self.psi2(a) };
                self.rp_vector(&x.expect("unit"))
            })
            .collect();
        rp.translates(&gens)
    }

    /// `R~P(A) = RP(A) / K^(1)` on the flattened generators.
    pub fn rp_tilde(&self) -> FpAb {
        self.refined().flat().quotient(&self.k_gens(1))
    }

    pub fn p_tilde(&self) -> FpAb {
        let gens: Vec<SparseRow> = self.w.iter().map(|&a| self.p_vector(&self.brace(a))).collect();
        self.pre_bloch().quotient(&gens)
    }

    /// Quotient bundle `P~`, `R~P`, `R~P_1`, `R~B`.
    pub fn tilde_quotients(&self) -> Result<TildeBundle, ScissorsError> {
        let rp_t = self.rp_tilde();
        let n = 1usize << self.rank;
        let pm = RElem::p_plus(self.class(self.minus_one()));
        let mut rels = IntMat::zeros(0, n);
        for g in 0..n as u32 {
            for h in 0..n as u32 {
                rels.push_row(Self::relem_row(&pm.mul(&RElem::pfister(g)).shift(&h)));
            }
        }
        let target = FpAb::new(n, rels)?;
        let l1 = AbMap::new(rp_t.clone(), target.clone(), self.lambda1().matrix().clone())?;
        let rp1 = l1.kernel();
        let s2 = self.s2();
        let extra: Vec<SparseRow> = self
            .ring
            .units()
            .iter()
            .map(|&a| s2.tensor(self.ring.neg(a), a))
            .collect();
        let s2t = s2.group.quotient(&extra);
        let l2 = AbMap::new(rp_t.clone(), s2t.clone(), self.lambda2().matrix().clone())?;
        let rb = l2.restrict(&rp1).kernel();
        Ok(TildeBundle {
            p: self.p_tilde(),
            rp: rp_t,
            lambda1_target: target,
            lambda1: l1,
            rp1,
            s2: s2t,
            lambda2: l2,
            rb,
        })
    }

    /// `RP'(A)` with the map `[a]' -> g(a)/2` into `RP(A)` modulo 2-primary torsion.
    pub fn rp_prime(&self) -> Result<RpPrime, ScissorsError> {
        let r = &self.ring;
        if !((r.is_field() && r.size() >= 4) || r.residue_order() > 10) {
            return Err(ScissorsError::RingTooSmall(format!(
                "{} needs a field or a residue field with more than 10 elements",
                r.descriptor()
            )));
        }
        let mut rels: Vec<Vec<(usize, RElem)>> = Vec::new();
        let to_module = |y: &RPElem| -> Vec<(usize, RElem)> {
            let mut by_gen: BTreeMap<usize, RElem> = BTreeMap::new();
            for ((g, s), c) in y.terms() {
                by_gen.entry(self.wi(*s)).or_default().add_term(*g, *c);
            }
            by_gen.into_iter().filter(|(_, x)| !x.is_zero()).collect()
        };
        for (a, b) in self.pairs() {
            rels.push(to_module(&self.y_rel(a, b)));
        }
        let m1 = self.class(self.minus_one());
        for &a in &self.w {
            rels.push(to_module(&RPElem::term(m1, a).sub(&RPElem::sym(a))));
        }
        for &a in &self.w {
            rels.push(to_module(&RPElem::sym(a).add(&RPElem::sym(self.inv(a)))));
        }
        let module = RModPres::new(self.rank, self.w.len(), rels);
        let target = self.refined().flat().odd_quotient();
        let exponent = target
            .moduli()
            .iter()
            .filter(|d| !d.is_zero())
            .fold(BigInt::one(), |acc, d| acc.lcm(d));
        let half = (&exponent + BigInt::one()) / BigInt::from(2);
        let mut m = IntMat::zeros(0, target.ngens());
        for g in 0..1u32 << self.rank {
            for &a in &self.w {
                let v = self.rp_vector(&self.g_gen(a).act(&RElem::class(g)));
                m.push_row(v.into_iter().map(|(j, c)| (j, c * &half)).collect());
            }
        }
        let map = AbMap::new(module.flat().clone(), target.clone(), m)?;
        let img = map.image().group;
        let ker = map.kernel().group;
        let torsion_odd = target.odd_torsion_order();
        let is_odd_iso = img.free_rank() == 0
            && img.odd_torsion_order() == torsion_odd
            && ker.free_rank() == 0
            && ker.odd_torsion_order().is_one()
            && module.flat().free_rank() == 0;
        Ok(RpPrime { module, map, is_odd_iso })
    }

    /// Generators of `L_B`: `[au] - [a]` and `<<u>> C_B`, for `a` in `W`, `u` in `U_1`.
    pub fn l_gens(&self) -> Vec<SparseRow> {
        let r = &self.ring;
        let c = self.big_c();
        let mut gens = Vec::new();
        for &u in r.u1() {
            if u == r.one() {
                continue;
            }
            for &a in &self.w {
                let x = RPElem::sym(r.mul(a, u)).sub(&RPElem::sym(a));
                gens.push(self.rp_vector(&x));
            }
            gens.push(self.rp_vector(&c.act(&RElem::pfister(self.class(u)))));
        }
        self.refined().translates(&gens)
    }

    /// Compares `R~P(B)/L_B` with `R~P(k)` through the reduction map.
    pub fn l_submodule(&self) -> Result<LCheck, ScissorsError> {
        let r = &self.ring;
        if r.is_field() {
            return Err(ScissorsError::IsField(r.descriptor()));
        }
        if r.residue_order() < 5 {
            return Err(ScissorsError::RingTooSmall(format!(
                "residue field of {} has fewer than 5 elements",
                r.descriptor()
            )));
        }
        let k = r.residue_field();
        let kctx = ScissorsContext::new(&k)?;
        let rp_t = self.rp_tilde();
        let lg = self.l_gens();
        let l = rp_t.subgroup(&lg);
        let quotient = rp_t.quotient(&lg);
        let residue = kctx.rp_tilde();
        let mut m = IntMat::zeros(0, residue.ngens());
        for g in 0..1u32 << self.rank {
            let gk = kctx.class(r.residue(self.ring.square_classes().rep(g)));
            for &a in &self.w {
                m.push_row(kctx.rp_vector(&RPElem::term(gk, r.residue(a))));
            }
        }
        let map = AbMap::new(quotient.clone(), residue.clone(), m).ok();
        let map_is_iso = map.as_ref().is_some_and(|f| f.is_injective() && f.is_surjective());
        let same_invariants = crate::linalg::iso(&quotient, &residue);
        Ok(LCheck { l, quotient, residue, map, map_is_iso, same_invariants })
    }

    /// Is `x` zero in `R~P(A)`?
    pub fn in_k1_plus_relations(&self, x: &RPElem, rp_tilde: &FpAb) -> bool {
        rp_tilde.is_zero(&self.rp_vector(x))
    }

    /// `RP_1 -> R~P_1` is an isomorphism after inverting 2.
    pub fn rp1_tilde_odd_iso(&self, bundle: &TildeBundle) -> bool {
        iso_odd(self.rp1(), &bundle.rp1.group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: &str) -> ScissorsContext {
        ScissorsContext::new(&RingHandle::parse(d).unwrap()).unwrap()
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn pre_bloch_gf11() {
        let c = ctx("gf(11)");
        assert_eq!(c.pre_bloch().order(), Some(BigInt::from(12)));
        assert_eq!(c.pre_bloch().odd_invariants(), bi(&[3]));
        assert_eq!(c.pairs().len(), 72);
    }

    #[test]
    fn bloch_orders() {
        assert_eq!(ctx("gf(11)").bloch().order(), Some(BigInt::from(6)));
        assert_eq!(ctx("gf(13)").bloch().order(), Some(BigInt::from(7)));
    }

    #[test]
    fn s2_gf7() {
        let c = ctx("gf(7)");
        assert_eq!(c.s2_of_units().invariant_factors(), bi(&[2]));
        assert_eq!(c.s2_of_units().free_rank(), 0);
        assert!(c.lambda_map().is_surjective());
    }

    #[test]
    fn too_small() {
        assert!(ScissorsContext::new(&RingHandle::parse("gf(3)").unwrap()).is_err());
        assert!(ScissorsContext::new(&RingHandle::parse("gf(4)").unwrap()).is_ok());
    }

    #[test]
    fn c_orders() {
        let c = ctx("gf(11)");
        assert_eq!(c.p_order(&c.c_const()), Some(BigInt::from(6)));
        let c = ctx("gf(13)");
        assert_eq!(c.p_order(&c.c_const()), Some(BigInt::one()));
    }

    #[test]
    fn six_c_vanishes() {
        for d in ["gf(7)", "gf(11)", "z/49"] {
            let c = ctx(d);
            assert!(c.rp_is_zero(&c.big_c().scale(6)), "{d}");
            let m1 = c.minus_one();
            assert!(c.rp_is_zero(&c.big_c().scale(3).sub(&c.psi1(m1).unwrap())), "{d}");
        }
    }

    #[test]
    fn rp1_gf11() {
        let c = ctx("gf(11)");
        assert_eq!(c.rp1().odd_invariants(), bi(&[3]));
        assert!(iso_odd(c.rp1(), c.pre_bloch()));
    }

    #[test]
    fn not_unit() {
        let c = ctx("z/49");
        assert!(c.psi1(RingElem(7)).is_err());
    }
}
