//! The tree of homothety classes of `Z_(p)`-lattices in `Q^2`, the action of
//! `GL_2(Q)` on it, and amalgam words in `SL_2(Z[1/p])`.
//!
//! `Λ_0 = A ⊕ A`, `Λ_1 = A ⊕ pA = g_π Λ_0` with `g_π = [[0,-1],[p,0]]`,
//! `G_0 = SL_2(A)` and `G_1 = Stab(Λ_1) = {[[a, b/p],[pc, d]]}`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("matrix is singular")]
    Singular,
    #[error("determinant is not 1")]
    NotSpecial,
    #[error("matrix has denominators prime to {0}")]
    NotPIntegral(u64),
    #[error("matrix is not in SL_2(Z_(p))")]
    NotInG0,
    #[error("cannot parse matrix: {0}")]
    Parse(String),
    #[error("level must be 0, 1 or 2, got {0}")]
    Level(u8),
}

pub type Q = BigRational;

/// A 2×2 rational matrix; columns of a lattice basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat2(pub [[Q; 2]; 2]);

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qpow(p: u64, e: i64) -> Q {
    let base = q(p as i64);
    if e >= 0 {
        Pow::pow(base, e as u64)
    } else {
        Pow::pow(base.recip(), (-e) as u64)
    }
}

/// `p`-adic valuation; `None` for zero.
pub fn val(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.clone();
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        e
    };
    Some(count(x.numer()) - count(x.denom()))
}

impl Mat2 {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Mat2 {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(q(a), q(b), q(c), q(d))
    }

    pub fn identity() -> Mat2 {
        Mat2::from_i64(1, 0, 0, 1)
    }

    pub fn scalar(x: Q) -> Mat2 {
        Mat2::new(x.clone(), Q::zero(), Q::zero(), x)
    }

    pub fn diag(x: Q, y: Q) -> Mat2 {
        Mat2::new(x, Q::zero(), Q::zero(), y)
    }

    /// `[[0,-1],[p,0]]`
    pub fn g_pi(p: u64) -> Mat2 {
        Mat2::from_i64(0, -1, p as i64, 0)
    }

    pub fn det(&self) -> Q {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn inv(&self) -> Option<Mat2> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(&m[1][1] / &d, -&m[0][1] / &d, -&m[1][0] / &d, &m[0][0] / &d))
    }

    pub fn entries(&self) -> [&Q; 4] {
        [&self.0[0][0], &self.0[0][1], &self.0[1][0], &self.0[1][1]]
    }

    pub fn min_val(&self, p: u64) -> Option<i64> {
        self.entries().iter().filter_map(|x| val(x, p)).min()
    }

    /// Are all denominators powers of `p`?
    pub fn in_z_1_over_p(&self, p: u64) -> bool {
        self.entries().iter().all(|x| {
            let mut d = x.denom().clone();
            let pb = BigInt::from(p);
            while (&d % &pb).is_zero() {
                d /= &pb;
            }
            d.is_one()
        })
    }

    fn is_p_integral(&self, p: u64) -> bool {
        self.entries().iter().all(|x| val(x, p).is_none_or(|v| v >= 0))
    }

    /// Parses `a,b;c,d` with entries such as `3`, `-1/7`.
    pub fn parse(s: &str) -> Result<Mat2, TreeError> {
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(TreeError::Parse(s.to_string()));
        }
        let mut e = Vec::new();
        for r in rows {
            for x in r.split(',') {
                e.push(parse_q(x.trim()).ok_or_else(|| TreeError::Parse(s.to_string()))?);
            }
        }
        if e.len() != 4 {
            return Err(TreeError::Parse(s.to_string()));
        }
        let mut it = e.into_iter();
        Ok(Mat2::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()))
    }
}

fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n.parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "{},{};{},{}", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// A lattice given by a basis in the columns of a nonsingular matrix.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub basis: Mat2,
}

/// Canonical key of a homothety class.
///
/// `A { a, c }`: the class of `span{(p^a, 0), (c, 1)}`, `0 <= c < p^a`.
/// `B { b, d }`: the class of `span{(0, p^b), (1, p d)}`, `b >= 1`, `0 <= d < p^(b-1)`.
/// Every class has a unique primitive integral representative, and it has
/// exactly one of these two shapes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VertexKey {
    A { a: u32, c: BigInt },
    B { b: u32, d: BigInt },
}

impl VertexKey {
    pub fn lambda0() -> VertexKey {
        VertexKey::A { a: 0, c: BigInt::zero() }
    }

    pub fn lambda1() -> VertexKey {
        VertexKey::B { b: 1, d: BigInt::zero() }
    }

    /// A basis matrix of the representative.
    pub fn basis(&self, p: u64) -> Mat2 {
        match self {
            VertexKey::A { a, c } => {
                Mat2::new(qpow(p, *a as i64), Q::from_integer(c.clone()), Q::zero(), Q::one())
            }
            VertexKey::B { b, d } => Mat2::new(
                Q::zero(),
                Q::one(),
                qpow(p, *b as i64),
                Q::from_integer(d * BigInt::from(p)),
            ),
        }
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKey::A { a, c } => write!(f, "A({a},{c})"),
            VertexKey::B { b, d } => write!(f, "B({b},{d})"),
        }
    }
}

/// `x mod p^k` for a `p`-integral rational.
fn residue_mod(x: &Q, p: u64, k: u32) -> BigInt {
    let m = BigInt::from(p).pow(k);
    if m.is_one() {
        return BigInt::zero();
    }
    let n = x.numer().mod_floor(&m);
    let d = x.denom().mod_floor(&m);
    let inv = d.extended_gcd(&m).x.mod_floor(&m);
    (n * inv).mod_floor(&m)
}

pub fn canonical_vertex(l: &Lattice, p: u64) -> Result<VertexKey, TreeError> {
    if l.basis.det().is_zero() {
        return Err(TreeError::Singular);
    }
    let k = -l.basis.min_val(p).expect("nonzero");
    let s = qpow(p, k);
    let m: Vec<Vec<Q>> = l.basis.0.iter().map(|r| r.iter().map(|x| x * &s).collect()).collect();
    let v = |x: &Q| val(x, p).unwrap_or(i64::MAX);
    let beta = v(&m[1][0]).min(v(&m[1][1]));
    if beta == 0 {
        let j = if v(&m[1][0]) == 0 { 0 } else { 1 };
        let o = 1 - j;
        let x = &m[0][j] / &m[1][j];
        let first = &m[0][o] - &m[1][o] * &x;
        let a = v(&first) as u32;
        Ok(VertexKey::A { a, c: residue_mod(&x, p, a) })
    } else {
        let j = if v(&m[0][0]) == 0 { 0 } else { 1 };
        let o = 1 - j;
        let y = &m[1][j] / &m[0][j];
        let second = &m[1][o] - &m[0][o] * &y;
        let b = v(&second) as u32;
        let r = residue_mod(&y, p, b);
        Ok(VertexKey::B { b, d: r / BigInt::from(p) })
    }
}

fn key_of(m: &Mat2, p: u64) -> VertexKey {
    canonical_vertex(&Lattice { basis: m.clone() }, p).expect("nonsingular")
}

/// `v(det X) - 2 min v(X)` for `X = M_1^{-1} M_2`.
pub fn distance(v1: &VertexKey, v2: &VertexKey, p: u64) -> u64 {
    let x = v1.basis(p).inv().expect("nonsingular").mul(&v2.basis(p));
    let dv = val(&x.det(), p).expect("nonsingular");
    (dv - 2 * x.min_val(p).expect("nonzero")) as u64
}

/// The `p + 1` vertices at distance one.
pub fn neighbors(v: &VertexKey, p: u64) -> Vec<VertexKey> {
    let m = v.basis(p);
    let mut out = Vec::with_capacity(p as usize + 1);
    for t in 0..p as i64 {
        out.push(key_of(&m.mul(&Mat2::from_i64(p as i64, t, 0, 1)), p));
    }
    out.push(key_of(&m.mul(&Mat2::from_i64(1, 0, 0, p as i64)), p));
    out
}

/// Class of `g L`.
pub fn act(g: &Mat2, v: &VertexKey, p: u64) -> Result<VertexKey, TreeError> {
    if g.det().is_zero() {
        return Err(TreeError::Singular);
    }
    Ok(key_of(&g.mul(&v.basis(p)), p))
}

/// Parity of `v(det g)`.
pub fn epsilon(g: &Mat2, p: u64) -> Result<u8, TreeError> {
    let d = val(&g.det(), p).ok_or(TreeError::Singular)?;
    Ok(d.rem_euclid(2) as u8)
}

/// Vertices within distance `r` of `center`, with edge and cycle counts.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: VertexKey,
    pub radius: u32,
    pub vertices: BTreeSet<VertexKey>,
    pub edges: Vec<(VertexKey, VertexKey)>,
}

impl Ball {
    /// First Betti number of the induced graph.
    pub fn cycles(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph ball {\n");
        for v in &self.vertices {
            s.push_str(&format!("  \"{v}\";\n"));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Expected size `1 + (p+1)(p^r - 1)/(p - 1)`.
pub fn ball_size(p: u64, r: u32) -> u64 {
    1 + (p + 1) * (p.pow(r) - 1) / (p - 1)
}

pub fn ball(center: &VertexKey, radius: u32, p: u64) -> Ball {
    let mut depth: BTreeMap<VertexKey, u32> = BTreeMap::new();
    depth.insert(center.clone(), 0);
    let mut queue = VecDeque::from([center.clone()]);
    let mut edges = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        let dv = depth[&v];
        for w in neighbors(&v, p) {
            let inside = match depth.get(&w) {
                Some(_) => true,
                None if dv < radius => {
                    depth.insert(w.clone(), dv + 1);
                    queue.push_back(w.clone());
                    true
                }
                None => false,
            };
            if inside {
                let e = if v < w { (v.clone(), w) } else { (w, v.clone()) };
                edges.insert(e);
            }
        }
    }
    Ball {
        center: center.clone(),
        radius,
        vertices: depth.into_keys().collect(),
        edges: edges.into_iter().collect(),
    }
}

/// `g = (pI)^s R diag(u, 1) g_π^ε` with `det R = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardDecomposition {
    pub s: i64,
    pub r: Mat2,
    pub u: Q,
    pub epsilon: u8,
}

impl StandardDecomposition {
    pub fn product(&self, p: u64) -> Mat2 {
        let mut m = Mat2::scalar(qpow(p, self.s)).mul(&self.r).mul(&Mat2::diag(self.u.clone(), Q::one()));
        if self.epsilon == 1 {
            m = m.mul(&Mat2::g_pi(p));
        }
        m
    }
}

pub fn standard_decomposition(g: &Mat2, p: u64) -> Result<StandardDecomposition, TreeError> {
    let det = g.det();
    let dv = val(&det, p).ok_or(TreeError::Singular)?;
    let epsilon = dv.rem_euclid(2);
    let s = (dv - epsilon) / 2;
    let u = &det / qpow(p, 2 * s + epsilon);
    let mut r = Mat2::scalar(qpow(p, -s)).mul(g);
    if epsilon == 1 {
        r = r.mul(&Mat2::g_pi(p).inv().expect("nonsingular"));
    }
    r = r.mul(&Mat2::diag(u.recip(), Q::one()));
    Ok(StandardDecomposition { s, r, u, epsilon: epsilon as u8 })
}

/// `G_0 = SL_2(Z_(p))`.
pub fn in_g0(g: &Mat2, p: u64) -> bool {
    g.det().is_one() && g.is_p_integral(p)
}

/// `G_1 = {[[a, b/p], [pc, d]] : [[a,b],[c,d]] in SL_2(Z_(p))}`.
pub fn in_g1(g: &Mat2, p: u64) -> bool {
    let m = &g.0;
    let ok = |x: &Q, lo: i64| val(x, p).is_none_or(|v| v >= lo);
    g.det().is_one() && ok(&m[0][0], 0) && ok(&m[0][1], -1) && ok(&m[1][0], 1) && ok(&m[1][1], 0)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    G0,
    G1,
}

impl Side {
    pub fn contains(self, g: &Mat2, p: u64) -> bool {
        match self {
            Side::G0 => in_g0(g, p),
            Side::G1 => in_g1(g, p),
        }
    }
}

/// An alternating product of factors from `G_0` and `G_1`.
#[derive(Clone, Debug)]
pub struct AmalgamWord {
    pub factors: Vec<(Mat2, Side)>,
}

impl AmalgamWord {
    pub fn product(&self) -> Mat2 {
        self.factors.iter().fold(Mat2::identity(), |acc, (m, _)| acc.mul(m))
    }

    pub fn alternates(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].1 != w[1].1)
    }

    pub fn members_ok(&self, p: u64) -> bool {
        self.factors.iter().all(|(m, s)| s.contains(m, p))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// `k` in `G_0` with `k Λ_1 = A(1, t)`.
fn g0_mover(t: &BigInt) -> Mat2 {
    Mat2::new(Q::from_integer(t.clone()), q(-1), q(1), q(0))
}

/// Element of `G_i` fixing `Λ_i` and sending `Λ_{1-i}` to the neighbor `w` of `Λ_i`.
fn mover(side: Side, w: &VertexKey, p: u64) -> Mat2 {
    match side {
        Side::G0 => match w {
            VertexKey::A { c, .. } => g0_mover(c),
            VertexKey::B { .. } => Mat2::identity(),
        },
        Side::G1 => {
            let gp = Mat2::g_pi(p);
            let gpi = gp.inv().expect("nonsingular");
            let w0 = act(&gpi, w, p).expect("nonsingular");
            let k0 = match &w0 {
                VertexKey::A { c, .. } => g0_mover(c),
                VertexKey::B { .. } => Mat2::identity(),
            };
            gp.mul(&k0).mul(&gpi)
        }
    }
}

/// Decomposes `g` in `SL_2(Z[1/p])` by geodesic descent towards the edge `(Λ_0, Λ_1)`.
pub fn amalgam_decompose(g: &Mat2, p: u64) -> Result<AmalgamWord, TreeError> {
    if !g.det().is_one() {
        return Err(TreeError::NotSpecial);
    }
    if !g.in_z_1_over_p(p) {
        return Err(TreeError::NotPIntegral(p));
    }
    let l = [VertexKey::lambda0(), VertexKey::lambda1()];
    let mut h = g.clone();
    let mut factors: Vec<(Mat2, Side)> = Vec::new();
    loop {
        if in_g0(&h, p) || in_g1(&h, p) {
            let side = if in_g0(&h, p) { Side::G0 } else { Side::G1 };
            push_factor(&mut factors, h, side);
            break;
        }
        let img = [act(&h, &l[0], p)?, act(&h, &l[1], p)?];
        let dist = |i: usize| {
            (0..2)
                .map(|j| (distance(&l[i], &img[j], p), j))
                .min()
                .expect("two endpoints")
        };
        let (d0, j0) = dist(0);
        let (d1, j1) = dist(1);
        let (i, target, dt) = if d0 < d1 { (0, j0, d0) } else { (1, j1, d1) };
        let side = if i == 0 { Side::G0 } else { Side::G1 };
        let w = neighbors(&l[i], p)
            .into_iter()
            .filter(|w| distance(w, &img[target], p) + 1 == dt)
            .min()
            .expect("geodesic step");
        let k = mover(side, &w, p);
        h = k.inv().expect("nonsingular").mul(&h);
        push_factor(&mut factors, k, side);
    }
    Ok(AmalgamWord { factors })
}

fn push_factor(factors: &mut Vec<(Mat2, Side)>, m: Mat2, side: Side) {
    if let Some((last, s)) = factors.last_mut() {
        if *s == side {
            *last = last.mul(&m);
            return;
        }
    }
    factors.push((m, side));
}

/// Membership in `Γ_0`, `Γ_1` or `Γ_2` of the maximal ideal (levels 0, 1, 2).
pub fn gamma_membership(g: &Mat2, level: u8, p: u64) -> Result<bool, TreeError> {
    if !in_g0(g, p) {
        return Err(TreeError::NotInG0);
    }
    let in_m = |x: &Q| val(x, p).is_none_or(|v| v >= 1);
    let m = &g.0;
    match level {
        0 => Ok(in_m(&m[1][0])),
        1 => Ok(in_m(&m[1][0]) && in_m(&m[0][1])),
        2 => Ok(in_m(&m[1][0]) && in_m(&m[0][1]) && in_m(&(&m[0][0] - &m[1][1]))),
        l => Err(TreeError::Level(l)),
    }
}

/// Random element of `SL_2(Z[1/p])` with denominators dividing `p^max_e`.
pub fn random_sl2(rng: &mut ChaCha8Rng, p: u64, max_e: u32) -> Mat2 {
    loop {
        let mut m = Mat2::identity();
        for _ in 0..rng.gen_range(1..=4) {
            let n: i64 = rng.gen_range(-6..=6);
            let e: i64 = rng.gen_range(0..=2);
            let x = q(n) / qpow(p, e);
            let f = if rng.gen_bool(0.5) {
                Mat2::new(q(1), x, q(0), q(1))
            } else {
                Mat2::new(q(1), q(0), x, q(1))
            };
            m = m.mul(&f);
        }
        if m.min_val(p).is_none_or(|v| v >= -(max_e as i64)) {
            return m;
        }
    }
}

/// Random nonsingular rational matrix built from small integers and powers of `p`.
pub fn random_gl2(rng: &mut ChaCha8Rng, p: u64) -> Mat2 {
    loop {
        let mut e = || {
            let n: i64 = rng.gen_range(-9..=9);
            q(n) * qpow(p, rng.gen_range(-2..=2))
        };
        let m = Mat2::new(e(), e(), e(), e());
        if !m.det().is_zero() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn key(m: Mat2, p: u64) -> VertexKey {
        canonical_vertex(&Lattice { basis: m }, p).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let p = 7;
        assert_eq!(key(Mat2::identity(), p), VertexKey::lambda0());
        assert_eq!(key(Mat2::from_i64(7, 0, 0, 1), p), VertexKey::A { a: 1, c: 0.into() });
        assert_eq!(key(Mat2::from_i64(1, 0, 0, 7), p), VertexKey::lambda1());
        assert_eq!(key(Mat2::from_i64(7, 0, 0, 7), p), VertexKey::lambda0());
        assert!(canonical_vertex(&Lattice { basis: Mat2::from_i64(1, 2, 2, 4) }, p).is_err());
    }

    #[test]
    fn distances() {
        let p = 5;
        let l0 = VertexKey::lambda0();
        assert_eq!(distance(&l0, &VertexKey::lambda1(), p), 1);
        assert_eq!(distance(&l0, &key(Mat2::from_i64(25, 0, 0, 1), p), p), 2);
        assert_eq!(distance(&l0, &l0, p), 0);
    }

    #[test]
    fn neighbor_counts() {
        let n = neighbors(&VertexKey::lambda0(), 7);
        assert_eq!(n.iter().collect::<BTreeSet<_>>().len(), 8);
        let n = neighbors(&VertexKey::lambda1(), 11);
        assert_eq!(n.iter().collect::<BTreeSet<_>>().len(), 12);
        assert!(n.contains(&VertexKey::lambda0()));
        for w in neighbors(&VertexKey::A { a: 2, c: 3.into() }, 5) {
            assert!(neighbors(&w, 5).contains(&VertexKey::A { a: 2, c: 3.into() }));
        }
    }

    #[test]
    fn action_examples() {
        let p = 7;
        assert_eq!(epsilon(&Mat2::g_pi(p), p).unwrap(), 1);
        assert_eq!(act(&Mat2::g_pi(p), &VertexKey::lambda0(), p).unwrap(), VertexKey::lambda1());
        assert_eq!(act(&Mat2::g_pi(p), &VertexKey::lambda1(), p).unwrap(), VertexKey::lambda0());
        let v = VertexKey::A { a: 2, c: 10.into() };
        assert_eq!(act(&Mat2::from_i64(7, 0, 0, 7), &v, p).unwrap(), v);
    }

    #[test]
    fn balls() {
        for p in [2u64, 3, 5] {
            for r in 0..=3 {
                let b = ball(&VertexKey::lambda0(), r, p);
                assert_eq!(b.vertices.len() as u64, ball_size(p, r));
                assert_eq!(b.cycles(), 0);
            }
        }
        assert!(ball(&VertexKey::lambda0(), 1, 3).to_dot().contains("--"));
    }

    #[test]
    fn standard_examples() {
        let p = 5;
        let u = Q::new(3.into(), 2.into());
        let d = standard_decomposition(&Mat2::diag(u.clone(), Q::one()), p).unwrap();
        assert_eq!(d, StandardDecomposition { s: 0, r: Mat2::identity(), u, epsilon: 0 });
        let d = standard_decomposition(&Mat2::g_pi(p), p).unwrap();
        assert_eq!((d.s, d.r.clone(), d.u.clone(), d.epsilon), (0, Mat2::identity(), Q::one(), 1));
        let d = standard_decomposition(&Mat2::from_i64(5, 0, 0, 5), p).unwrap();
        assert_eq!((d.s, d.r.clone(), d.u.clone(), d.epsilon), (1, Mat2::identity(), Q::one(), 0));
    }

    #[test]
    fn amalgam_examples() {
        let p = 7;
        let w = amalgam_decompose(&Mat2::from_i64(2, 3, 5, 8), p).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.factors[0].1, Side::G0);
        let g = Mat2::parse("1,1/7;0,1").unwrap();
        let w = amalgam_decompose(&g, p).unwrap();
        assert_eq!((w.len(), w.factors[0].1), (1, Side::G1));
        let g = Mat2::parse("1,0;1/7,1").unwrap();
        let w = amalgam_decompose(&g, p).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.factors[0].1, Side::G0);
        assert_eq!(w.product(), g);
        assert!(w.alternates() && w.members_ok(p));
        assert!(amalgam_decompose(&Mat2::from_i64(2, 0, 0, 1), p).is_err());
        assert!(amalgam_decompose(&Mat2::parse("1,1/3;0,1").unwrap(), p).is_err());
    }

    #[test]
    fn gamma_examples() {
        let p = 7;
        for l in 0..=2 {
            assert!(gamma_membership(&Mat2::from_i64(1, 0, 7, 1), l, p).unwrap());
        }
        let g = Mat2::from_i64(1, 1, 0, 1);
        assert!(gamma_membership(&g, 0, p).unwrap());
        assert!(!gamma_membership(&g, 1, p).unwrap());
        let g = Mat2::diag(q(2), Q::new(1.into(), 2.into()));
        assert!(gamma_membership(&g, 1, p).unwrap());
        assert!(!gamma_membership(&g, 2, p).unwrap());
        assert!(gamma_membership(&Mat2::g_pi(p), 0, p).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn parity_law(seed in any::<u64>(), pi in 0usize..3) {
            let p = [5u64, 7, 11][pi];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_gl2(&mut rng, p);
            let v = key(random_gl2(&mut rng, p), p);
            let w = act(&g, &v, p).unwrap();
            let dv = val(&g.det(), p).unwrap();
            prop_assert_eq!(distance(&v, &w, p) as i64 % 2, dv.rem_euclid(2));
        }

        #[test]
        fn amalgam_round_trip(seed in any::<u64>()) {
            let p = 5;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_sl2(&mut rng, p, 4);
            let w = amalgam_decompose(&g, p).unwrap();
            prop_assert_eq!(w.product(), g.clone());
            prop_assert!(w.alternates() && w.members_ok(p));
            let bound = distance(&VertexKey::lambda0(), &act(&g, &VertexKey::lambda0(), p).unwrap(), p) + 1;
            prop_assert!(w.len() as u64 <= bound);
            let again = amalgam_decompose(&w.product(), p).unwrap();
            prop_assert_eq!(again.len(), w.len());
        }

        #[test]
        fn standard_round_trip(seed in any::<u64>()) {
            let p = 7;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_gl2(&mut rng, p);
            let d = standard_decomposition(&g, p).unwrap();
            prop_assert!(d.r.det().is_one());
            prop_assert_eq!(d.product(p), g);
        }

        #[test]
        fn stabilizer(seed in any::<u64>()) {
            let p = 5;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_sl2(&mut rng, p, 3);
            let fixed = act(&g, &VertexKey::lambda0(), p).unwrap() == VertexKey::lambda0();
            prop_assert_eq!(fixed, in_g0(&g, p));
        }
    }
}
