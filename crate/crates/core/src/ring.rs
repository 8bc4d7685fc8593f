//! Finite local rings: `GF(p^d)`, `Z/p^n` and `GF(q)[t]/(t^m)`.
//!
//! Elements are indexed `0..size` in a fixed canonical order (base-`p` digit
//! encoding of the coefficient vector), so every enumeration in this crate is
//! deterministic.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::{FpAb, IntMat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring parameters: {0}")]
    BadParameters(String),
    #[error("ring of order {0} exceeds the supported size")]
    TooLarge(u64),
    #[error("cannot parse ring descriptor {0:?}")]
    Parse(String),
    #[error("element {0} is not a unit")]
    NotUnit(String),
}

/// Index of an element of a [`RingHandle`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RingElem(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `GF(p^d)`
    Field,
    /// `Z/p^n`
    IntMod { n: u32 },
    /// `GF(p^d)[t]/(t^m)`
    Truncated { m: u32 },
}

/// Largest supported ring order.
pub const MAX_RING_SIZE: u64 = 1 << 14;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// `(p, d)` with `q = p^d`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|k| q.is_multiple_of(*k))?;
    let mut r = q;
    let mut d = 0;
    while r.is_multiple_of(p) {
        r /= p;
        d += 1;
    }
    (r == 1).then_some((p, d))
}

/// `(p - 1) d > 6` for `q = p^d`.
pub fn sufficiently_large(q: u64) -> bool {
    match prime_power(q) {
        Some((p, d)) => (p - 1) * d as u64 > 6,
        None => false,
    }
}

/// Arithmetic in `GF(p^d)` on coefficient vectors.
#[derive(Clone, Debug)]
struct Gf {
    p: u64,
    d: usize,
    /// monic modulus, low degree first, length `d + 1`
    modulus: Vec<u64>,
}

impl Gf {
    fn new(p: u64, d: usize) -> Gf {
        let modulus = if d == 1 { vec![0, 1] } else { smallest_irreducible(p, d) };
        Gf { p, d, modulus }
    }

    fn size(&self) -> u64 {
        self.p.pow(self.d as u32)
    }

    fn decode(&self, mut x: u64) -> Vec<u64> {
        let mut v = vec![0; self.d];
        for c in v.iter_mut() {
            *c = x % self.p;
            x /= self.p;
        }
        v
    }

    fn encode(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.d == 1 {
            return (a + b) % self.p;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x.iter().zip(y.iter()).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn neg(&self, a: u64) -> u64 {
        if self.d == 1 {
            return (self.p - a) % self.p;
        }
        let x = self.decode(a);
        let s: Vec<u64> = x.iter().map(|u| (self.p - u) % self.p).collect();
        self.encode(&s)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.d == 1 {
            return a * b % self.p;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let r = poly_mulmod(&x, &y, &self.modulus, self.p);
        self.encode(&r)
    }
}

fn poly_mulmod(x: &[u64], y: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * d];
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + a * b) % p;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..d {
            prod[k - d + i] = (prod[k - d + i] + (p - c) * modulus[i]) % p;
        }
        prod[k] = 0;
    }
    prod.truncate(d);
    prod
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * bi) % p;
            }
        }
        r.pop();
    }
    r
}

/// The monic irreducible of degree `d` over `GF(p)` that is smallest in the
/// base-`p` encoding of its coefficient vector.
fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    let count = p.pow(d as u32);
    for code in 0..count {
        let mut f = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    for e in 1..=d / 2 {
        for code in 0..p.pow(e as u32) {
            let mut g = Vec::with_capacity(e + 1);
            let mut c = code;
            for _ in 0..e {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_string(coeffs: &[u64], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Square classes `A^x / (A^x)^2` labelled by bitmasks.
#[derive(Clone, Debug)]
pub struct SquareClasses {
    /// dimension over `F_2`
    pub rank: u32,
    class_of: Vec<u32>,
    reps: Vec<RingElem>,
}

impl SquareClasses {
    pub fn order(&self) -> usize {
        1 << self.rank
    }

    /// Smallest element in the class.
    pub fn rep(&self, mask: u32) -> RingElem {
        self.reps[mask as usize]
    }
}

/// The unit group as an abstract group with discrete logarithms.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub group: FpAb,
    pub gens: Vec<RingElem>,
    orders: Vec<u64>,
    dlog: HashMap<RingElem, Vec<i64>>,
}

impl UnitGroup {
    /// Exponent vector of a unit in terms of `gens`.
    pub fn log(&self, x: RingElem) -> &[i64] {
        &self.dlog[&x]
    }

    /// Relative orders of the greedy generators.
    pub fn relative_orders(&self) -> &[u64] {
        &self.orders
    }
}

#[derive(Debug)]
struct RingData {
    kind: RingKind,
    p: u64,
    field: Gf,
    size: u64,
    /// `p^n` for `Z/p^n`
    modulus_int: u64,
    inv: Vec<u32>,
    units: Vec<RingElem>,
    w: Vec<RingElem>,
    u1: Vec<RingElem>,
    classes: SquareClasses,
    residue: Option<RingHandle>,
}

/// A finite local ring from the supported families.
#[derive(Clone, Debug)]
pub struct RingHandle(Arc<RingData>);

impl PartialEq for RingHandle {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor()
    }
}

impl RingHandle {
    /// `GF(p^d)`.
    pub fn gf(p: u64, d: u32) -> Result<RingHandle, RingError> {
        Self::make(RingKind::Field, p, d)
    }

    /// `Z/p^n`.
    pub fn int_mod(p: u64, n: u32) -> Result<RingHandle, RingError> {
        Self::make(RingKind::IntMod { n }, p, 1)
    }

    /// `GF(p^d)[t]/(t^m)`.
    pub fn truncated(p: u64, d: u32, m: u32) -> Result<RingHandle, RingError> {
        Self::make(RingKind::Truncated { m }, p, d)
    }

    pub fn make(kind: RingKind, p: u64, d: u32) -> Result<RingHandle, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        if d == 0 {
            return Err(RingError::BadParameters("residue degree must be positive".into()));
        }
        let q = (p as u128).checked_pow(d).filter(|&q| q <= MAX_RING_SIZE as u128);
        let q = q.ok_or(RingError::TooLarge(u64::MAX))? as u64;
        let (size, modulus_int) = match kind {
            RingKind::Field => (q, 0),
            RingKind::IntMod { n } => {
                if n == 0 {
                    return Err(RingError::BadParameters("exponent must be positive".into()));
                }
                let s = (p as u128).checked_pow(n).filter(|&s| s <= MAX_RING_SIZE as u128);
                let s = s.ok_or(RingError::TooLarge(u64::MAX))? as u64;
                (s, s)
            }
            RingKind::Truncated { m } => {
                if m == 0 {
                    return Err(RingError::BadParameters("truncation degree must be positive".into()));
                }
                let s = (q as u128).checked_pow(m).filter(|&s| s <= MAX_RING_SIZE as u128);
                (s.ok_or(RingError::TooLarge(u64::MAX))? as u64, 0)
            }
        };
        let residue = match kind {
            RingKind::Field => None,
            RingKind::IntMod { n: 1 } | RingKind::Truncated { m: 1 } => None,
            _ => Some(RingHandle::gf(p, d)?),
        };
        // IntMod with n = 1 and Truncated with m = 1 are fields; normalise them
        let kind = match kind {
            RingKind::IntMod { n: 1 } | RingKind::Truncated { m: 1 } => RingKind::Field,
            k => k,
        };
        let mut data = RingData {
            kind,
            p,
            field: Gf::new(p, d as usize),
            size,
            modulus_int,
            inv: Vec::new(),
            units: Vec::new(),
            w: Vec::new(),
            u1: Vec::new(),
            classes: SquareClasses { rank: 0, class_of: Vec::new(), reps: Vec::new() },
            residue,
        };
        let tmp = RingHandle(Arc::new(RingData {
            kind: data.kind.clone(),
            p,
            field: data.field.clone(),
            size,
            modulus_int,
            inv: Vec::new(),
            units: Vec::new(),
            w: Vec::new(),
            u1: Vec::new(),
            classes: data.classes.clone(),
            residue: data.residue.clone(),
        }));
        let units: Vec<RingElem> = tmp.elements().filter(|&x| tmp.is_unit(x)).collect();
        let nunits = units.len() as u64;
        let mut inv = vec![u32::MAX; size as usize];
        for &x in &units {
            if inv[x.0 as usize] != u32::MAX {
                continue;
            }
            let y = tmp.pow(x, nunits - 1);
            inv[x.0 as usize] = y.0;
            inv[y.0 as usize] = x.0;
        }
        let one = tmp.one();
        let w = units.iter().copied().filter(|&x| tmp.is_unit(tmp.sub(one, x))).collect();
        let u1 = units.iter().copied().filter(|&x| tmp.is_unit(x) && !tmp.is_unit(tmp.sub(x, one))).collect();
        data.classes = square_classes(&tmp, &units);
        data.inv = inv;
        data.units = units;
        data.w = w;
        data.u1 = u1;
        Ok(RingHandle(Arc::new(data)))
    }

    /// Parses `gf(7)`, `gf(3^2)`, `gf(9)`, `z/7^2`, `z/49`, `gf(5)[t]/t^2`.
    pub fn parse(desc: &str) -> Result<RingHandle, RingError> {
        let s: String = desc.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let bad = || RingError::Parse(desc.to_string());
        let parse_pp = |t: &str| -> Result<(u64, u32), RingError> {
            if let Some((a, b)) = t.split_once('^') {
                let p: u64 = a.parse().map_err(|_| bad())?;
                let e: u32 = b.parse().map_err(|_| bad())?;
                if !is_prime(p) {
                    return Err(RingError::NotPrime(p));
                }
                Ok((p, e))
            } else {
                let q: u64 = t.parse().map_err(|_| bad())?;
                prime_power(q).ok_or(RingError::NotPrime(q))
            }
        };
        if let Some(rest) = s.strip_prefix("z/") {
            let (p, n) = parse_pp(rest)?;
            return RingHandle::int_mod(p, n);
        }
        let rest = s.strip_prefix("gf(").ok_or_else(bad)?;
        let (inner, tail) = rest.split_once(')').ok_or_else(bad)?;
        let (p, d) = parse_pp(inner)?;
        if tail.is_empty() {
            return RingHandle::gf(p, d);
        }
        let m = tail.strip_prefix("[t]/").ok_or_else(bad)?;
        let m = m.trim_start_matches('(').trim_end_matches(')');
        let m = m.strip_prefix("t").ok_or_else(bad)?;
        let m: u32 = if m.is_empty() { 1 } else { m.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())? };
        RingHandle::truncated(p, d, m)
    }

    /// Canonical descriptor string.
    pub fn descriptor(&self) -> String {
        let f = &self.0.field;
        let base = if f.d == 1 { format!("gf({})", f.p) } else { format!("gf({}^{})", f.p, f.d) };
        match self.0.kind {
            RingKind::Field => base,
            RingKind::IntMod { n } => format!("z/{}^{}", f.p, n),
            RingKind::Truncated { m } => format!("{base}[t]/t^{m}"),
        }
    }

    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }

    pub fn characteristic(&self) -> u64 {
        match self.0.kind {
            RingKind::IntMod { .. } => self.0.modulus_int,
            _ => self.0.p,
        }
    }

    /// Residue characteristic.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Order of the residue field.
    pub fn residue_order(&self) -> u64 {
        self.0.field.size()
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn is_field(&self) -> bool {
        self.0.kind == RingKind::Field
    }

    /// Modulus of the residue field over `GF(p)`, low degree first.
    pub fn field_modulus(&self) -> &[u64] {
        &self.0.field.modulus
    }

    pub fn field_modulus_string(&self) -> String {
        poly_string(&self.0.field.modulus, "t")
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> {
        (0..self.0.size as u32).map(RingElem)
    }

    pub fn zero(&self) -> RingElem {
        RingElem(0)
    }

    pub fn one(&self) -> RingElem {
        RingElem(1)
    }

    /// Image of an integer.
    pub fn from_int(&self, n: i64) -> RingElem {
        match self.0.kind {
            RingKind::IntMod { .. } => RingElem(n.rem_euclid(self.0.modulus_int as i64) as u32),
            _ => RingElem(n.rem_euclid(self.0.p as i64) as u32),
        }
    }

    fn trunc_parts(&self, x: RingElem) -> Vec<u64> {
        let q = self.0.field.size();
        let m = match self.0.kind {
            RingKind::Truncated { m } => m,
            _ => unreachable!(),
        };
        let mut v = Vec::with_capacity(m as usize);
        let mut r = x.0 as u64;
        for _ in 0..m {
            v.push(r % q);
            r /= q;
        }
        v
    }

    fn trunc_join(&self, v: &[u64]) -> RingElem {
        let q = self.0.field.size();
        RingElem(v.iter().rev().fold(0, |acc, &c| acc * q + c) as u32)
    }

    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        let f = &self.0.field;
        match self.0.kind {
            RingKind::Field => RingElem(f.add(a.0 as u64, b.0 as u64) as u32),
            RingKind::IntMod { .. } => RingElem(((a.0 as u64 + b.0 as u64) % self.0.modulus_int) as u32),
            RingKind::Truncated { .. } => {
                let (x, y) = (self.trunc_parts(a), self.trunc_parts(b));
                let s: Vec<u64> = x.iter().zip(y.iter()).map(|(&u, &v)| f.add(u, v)).collect();
                self.trunc_join(&s)
            }
        }
    }

    pub fn neg(&self, a: RingElem) -> RingElem {
        let f = &self.0.field;
        match self.0.kind {
            RingKind::Field => RingElem(f.neg(a.0 as u64) as u32),
            RingKind::IntMod { .. } => {
                RingElem(((self.0.modulus_int - a.0 as u64) % self.0.modulus_int) as u32)
            }
            RingKind::Truncated { .. } => {
                let s: Vec<u64> = self.trunc_parts(a).iter().map(|&u| f.neg(u)).collect();
                self.trunc_join(&s)
            }
        }
    }

    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        let f = &self.0.field;
        match self.0.kind {
            RingKind::Field => RingElem(f.mul(a.0 as u64, b.0 as u64) as u32),
            RingKind::IntMod { .. } => RingElem((a.0 as u64 * b.0 as u64 % self.0.modulus_int) as u32),
            RingKind::Truncated { .. } => {
                let (x, y) = (self.trunc_parts(a), self.trunc_parts(b));
                let m = x.len();
                let mut s = vec![0u64; m];
                for i in 0..m {
                    if x[i] == 0 {
                        continue;
                    }
                    for j in 0..m - i {
                        s[i + j] = f.add(s[i + j], f.mul(x[i], y[j]));
                    }
                }
                self.trunc_join(&s)
            }
        }
    }

    pub fn pow(&self, a: RingElem, mut e: u64) -> RingElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: RingElem) -> bool {
        match self.0.kind {
            RingKind::Field => a.0 != 0,
            RingKind::IntMod { .. } => !(a.0 as u64).is_multiple_of(self.0.p),
            RingKind::Truncated { .. } => !(a.0 as u64).is_multiple_of(self.0.field.size()),
        }
    }

    pub fn inv(&self, a: RingElem) -> Option<RingElem> {
        match self.0.inv.get(a.0 as usize) {
            Some(&i) if i != u32::MAX => Some(RingElem(i)),
            _ => None,
        }
    }

    pub fn div(&self, a: RingElem, b: RingElem) -> Option<RingElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Units in canonical order.
    pub fn units(&self) -> &[RingElem] {
        &self.0.units
    }

    /// `W_A = { a in A^x : 1 - a in A^x }` in canonical order.
    pub fn w(&self) -> &[RingElem] {
        &self.0.w
    }

    pub fn in_w(&self, a: RingElem) -> bool {
        self.is_unit(a) && self.is_unit(self.sub(self.one(), a))
    }

    /// `U_{1,A} = 1 + m_A`.
    pub fn u1(&self) -> &[RingElem] {
        &self.0.u1
    }

    pub fn square_classes(&self) -> &SquareClasses {
        &self.0.classes
    }

    /// Bitmask of the square class of a unit.
    pub fn class_of(&self, a: RingElem) -> u32 {
        let c = self.0.classes.class_of[a.0 as usize];
        assert!(c != u32::MAX, "square class of a non-unit");
        c
    }

    pub fn is_square(&self, a: RingElem) -> bool {
        self.class_of(a) == 0
    }

    /// Residue field (the ring itself for fields).
    pub fn residue_field(&self) -> RingHandle {
        self.0.residue.clone().unwrap_or_else(|| self.clone())
    }

    /// Reduction to the residue field.
    pub fn residue(&self, a: RingElem) -> RingElem {
        match self.0.kind {
            RingKind::Field => a,
            RingKind::IntMod { .. } => RingElem((a.0 as u64 % self.0.p) as u32),
            RingKind::Truncated { .. } => RingElem((a.0 as u64 % self.0.field.size()) as u32),
        }
    }

    /// A lift of a residue-field element (constant coefficient lift).
    pub fn lift_residue(&self, a: RingElem) -> RingElem {
        a
    }

    /// Structure of `A^x` with a greedy maximal-order generating set.
    pub fn unit_group(&self) -> UnitGroup {
        unit_group(self)
    }

    /// Human-readable element.
    pub fn format(&self, a: RingElem) -> String {
        let f = &self.0.field;
        match self.0.kind {
            RingKind::IntMod { .. } => a.0.to_string(),
            RingKind::Field => {
                if f.d == 1 {
                    a.0.to_string()
                } else {
                    poly_string(&f.decode(a.0 as u64), "t")
                }
            }
            RingKind::Truncated { .. } => {
                let parts = self.trunc_parts(a);
                if f.d == 1 {
                    poly_string(&parts, "t")
                } else {
                    let cs: Vec<String> = parts.iter().map(|&c| poly_string(&f.decode(c), "x")).collect();
                    format!("({})", cs.join(", "))
                }
            }
        }
    }

    /// Parses an element: an integer, or for `GF(p^d)` and truncated rings a
    /// polynomial such as `t^2+2*t+1`.
    pub fn parse_elem(&self, s: &str) -> Result<RingElem, RingError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(n) = s.parse::<i64>() {
            return Ok(self.from_int(n));
        }
        let t = self.generator().ok_or_else(|| RingError::Parse(s.clone()))?;
        let mut acc = self.zero();
        for term in s.replace('-', "+-").split('+').filter(|x| !x.is_empty()) {
            let (sign, term) = match term.strip_prefix('-') {
                Some(r) => (-1, r),
                None => (1, term),
            };
            let (c, mono) = match term.split_once('*') {
                Some((c, m)) => (c.parse::<i64>().map_err(|_| RingError::Parse(s.clone()))?, m),
                None if term.starts_with('t') => (1, term),
                None => (term.parse::<i64>().map_err(|_| RingError::Parse(s.clone()))?, ""),
            };
            let e: u64 = match mono {
                "" => 0,
                "t" => 1,
                m => m
                    .strip_prefix("t^")
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| RingError::Parse(s.clone()))?,
            };
            acc = self.add(acc, self.mul(self.from_int(sign * c), self.pow(t, e)));
        }
        Ok(acc)
    }

    fn generator(&self) -> Option<RingElem> {
        match self.0.kind {
            RingKind::Field if self.0.field.d > 1 => Some(RingElem(self.0.p as u32)),
            RingKind::Truncated { .. } => Some(RingElem(self.0.field.size() as u32)),
            _ => None,
        }
    }
}

impl fmt::Display for RingHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn square_classes(r: &RingHandle, units: &[RingElem]) -> SquareClasses {
    let n = r.size() as usize;
    let mut class_of = vec![u32::MAX; n];
    let mut labelled: Vec<RingElem> = Vec::new();
    for &x in units {
        let s = r.mul(x, x);
        if class_of[s.0 as usize] == u32::MAX {
            class_of[s.0 as usize] = 0;
            labelled.push(s);
        }
    }
    let mut rank = 0u32;
    for &x in units {
        if class_of[x.0 as usize] != u32::MAX {
            continue;
        }
        let bit = 1u32 << rank;
        rank += 1;
        let current = labelled.clone();
        for y in current {
            let z = r.mul(x, y);
            class_of[z.0 as usize] = class_of[y.0 as usize] | bit;
            labelled.push(z);
        }
    }
    let mut reps = vec![RingElem(u32::MAX); 1 << rank];
    for &x in units {
        let c = class_of[x.0 as usize] as usize;
        if reps[c].0 == u32::MAX {
            reps[c] = x;
        }
    }
    SquareClasses { rank, class_of, reps }
}

fn unit_group(r: &RingHandle) -> UnitGroup {
    let units = r.units();
    let order_of = |x: RingElem| -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != r.one() {
            y = r.mul(y, x);
            k += 1;
        }
        k
    };
    let mut dlog: HashMap<RingElem, Vec<i64>> = HashMap::new();
    dlog.insert(r.one(), Vec::new());
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    let mut rels: Vec<Vec<i64>> = Vec::new();
    while dlog.len() < units.len() {
        // greedy: a unit of maximal order outside the current subgroup
        let x = units
            .iter()
            .copied()
            .filter(|u| !dlog.contains_key(u))
            .max_by_key(|&u| (order_of(u), std::cmp::Reverse(u)))
            .unwrap();
        let g = gens.len();
        for v in dlog.values_mut() {
            v.push(0);
        }
        let old: Vec<(RingElem, Vec<i64>)> = dlog.iter().map(|(k, v)| (*k, v.clone())).collect();
        let mut k = 1i64;
        let mut xk = x;
        while !dlog.contains_key(&xk) || k == 0 {
            for (h, v) in &old {
                let mut w = v.clone();
                w[g] = k;
                dlog.insert(r.mul(xk, *h), w);
            }
            xk = r.mul(xk, x);
            k += 1;
        }
        let mut rel = dlog[&xk].clone();
        for e in rel.iter_mut() {
            *e = -*e;
        }
        rel[g] += k;
        rels.push(rel);
        gens.push(x);
        orders.push(k as u64);
    }
    let n = gens.len();
    let mut m = IntMat::zeros(0, n);
    for rel in &rels {
        let mut row: Vec<i64> = rel.clone();
        row.resize(n, 0);
        let e: Vec<(usize, i64)> = row.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect();
        m.push_row_i64(&e);
    }
    for v in dlog.values_mut() {
        v.resize(n, 0);
    }
    let group = FpAb::new(n, m).expect("shape");
    UnitGroup { group, gens, orders, dlog }
}

/// `|A^x|` as an integer.
pub fn unit_count(r: &RingHandle) -> BigInt {
    BigInt::from(r.units().len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf9_modulus() {
        let r = RingHandle::gf(3, 2).unwrap();
        assert_eq!(r.field_modulus(), &[1, 0, 1]);
        assert_eq!(r.field_modulus_string(), "t^2+1");
        assert_eq!(r.descriptor(), "gf(3^2)");
    }

    #[test]
    fn gf7_classes() {
        let r = RingHandle::parse("gf(7)").unwrap();
        assert_eq!(r.square_classes().order(), 2);
        assert_eq!(r.square_classes().rep(1), RingElem(3));
        assert_eq!(r.w().len(), 5);
        assert!(r.u1() == [RingElem(1)]);
    }

    #[test]
    fn z49() {
        let r = RingHandle::parse("z/7^2").unwrap();
        assert_eq!(r.units().len(), 42);
        assert_eq!(r.u1().len(), 7);
        assert_eq!(r.w().len(), 35);
        assert_eq!(r.residue_field().descriptor(), "gf(7)");
        assert_eq!(r.residue(r.from_int(10)), RingElem(3));
        assert_eq!(RingHandle::parse("z/49").unwrap().descriptor(), "z/7^2");
    }

    #[test]
    fn truncated() {
        let r = RingHandle::parse("gf(5)[t]/t^2").unwrap();
        assert_eq!(r.size(), 25);
        assert_eq!(r.units().len(), 20);
        let t = r.parse_elem("t").unwrap();
        assert_eq!(r.mul(t, t), r.zero());
        let u = r.parse_elem("1+t").unwrap();
        assert_eq!(r.mul(u, r.inv(u).unwrap()), r.one());
        assert_eq!(r.square_classes().order(), 2);
    }

    #[test]
    fn field_axioms_gf8() {
        let r = RingHandle::gf(2, 3).unwrap();
        for a in r.elements() {
            if a != r.zero() {
                assert_eq!(r.mul(a, r.inv(a).unwrap()), r.one());
            }
            for b in r.elements() {
                assert_eq!(r.mul(a, b), r.mul(b, a));
            }
        }
        assert_eq!(r.square_classes().order(), 1);
    }

    #[test]
    fn unit_groups() {
        let r = RingHandle::gf(7, 1).unwrap();
        let ug = r.unit_group();
        assert_eq!(ug.group.invariant_factors(), vec![BigInt::from(6)]);
        let r = RingHandle::int_mod(2, 3).unwrap();
        let ug = r.unit_group();
        assert_eq!(ug.group.invariant_factors(), vec![BigInt::from(2), BigInt::from(2)]);
        for &u in r.units() {
            let l = ug.log(u);
            let mut x = r.one();
            for (g, &e) in ug.gens.iter().zip(l) {
                x = r.mul(x, r.pow(*g, e as u64));
            }
            assert_eq!(x, u);
        }
    }

    #[test]
    fn sufficiently_large_list() {
        let small: Vec<u64> = (2..200).filter(|&q| prime_power(q).is_some() && !sufficiently_large(q)).collect();
        assert_eq!(small, vec![2, 3, 4, 5, 7, 8, 9, 16, 27, 32, 64]);
    }

    #[test]
    fn errors() {
        assert_eq!(RingHandle::gf(6, 1).unwrap_err(), RingError::NotPrime(6));
        assert!(RingHandle::parse("foo").is_err());
    }
}
