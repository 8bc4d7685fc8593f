//! Order formulas over global fields: odd parts, the image of indecomposable
//! `K_3` in `P(k)`, and `P̄(F_p)` for `F = Q`.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::ring::{is_prime, RingHandle};
use crate::scissors::{ScissorsContext, ScissorsError};

#[derive(Debug, Error)]
pub enum GlobalError {
    #[error("odd part needs n >= 1, got {0}")]
    NonPositive(i64),
    #[error("w2 must be >= 1")]
    BadW2,
    #[error("characteristic {char} divides w2 = {w2}")]
    CharDividesW2 { char: u64, w2: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("p = {0} must be a prime >= 11")]
    PrimeTooSmall(u64),
    #[error(transparent)]
    Scissors(#[from] ScissorsError),
}

pub fn odd_part(n: i64) -> Result<u64, GlobalError> {
    if n < 1 {
        return Err(GlobalError::NonPositive(n));
    }
    let n = n as u64;
    Ok(n >> n.trailing_zeros())
}

fn odd(n: u64) -> u64 {
    n >> n.trailing_zeros()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    Rationals,
    UserSupplied,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalFieldDesc {
    pub kind: FieldKind,
    pub w2: u64,
}

impl GlobalFieldDesc {
    pub fn rationals() -> GlobalFieldDesc {
        GlobalFieldDesc { kind: FieldKind::Rationals, w2: 24 }
    }

    pub fn with_w2(w2: u64) -> Result<GlobalFieldDesc, GlobalError> {
        if w2 == 0 {
            return Err(GlobalError::BadW2);
        }
        Ok(GlobalFieldDesc { kind: FieldKind::UserSupplied, w2 })
    }
}

/// Smallest prime factor, if `q` is a prime power.
fn char_of(q: u64) -> Option<u64> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    (r == 1).then_some(p)
}

/// `gcd(w2, (q+1)/2)`, or `gcd(w2, q+1)` in characteristic 2.
pub fn k3_image_formula(w2: u64, q: u64, char2: bool) -> u64 {
    if char2 {
        w2.gcd(&(q + 1))
    } else {
        w2.gcd(&q.div_ceil(2))
    }
}

/// Order of the image of `K_3^ind` of the valuation ring in `P(k)`, `|k| = q`.
pub fn k3_image_order(desc: &GlobalFieldDesc, q: u64, char2: bool) -> Result<u64, GlobalError> {
    let ch = char_of(q).ok_or(GlobalError::NotPrimePower(q))?;
    if (ch == 2) != char2 {
        return Err(GlobalError::NotPrimePower(q));
    }
    if desc.w2.is_multiple_of(ch) {
        return Err(GlobalError::CharDividesW2 { char: ch, w2: desc.w2 });
    }
    Ok(k3_image_formula(desc.w2, q, char2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PBarReport {
    pub p: u64,
    pub p_plus_one_odd: u64,
    pub killed: u64,
    pub pbar_odd_order: u64,
    pub three_divides: bool,
    /// Odd order of `P(F_p) / <c>` for `Q` (`None` for other fields).
    pub c_quotient_order: Option<u64>,
}

impl PBarReport {
    pub fn consistent(&self) -> bool {
        self.pbar_odd_order * self.killed == self.p_plus_one_odd
            && self.c_quotient_order.is_none_or(|c| c == self.pbar_odd_order)
    }
}

pub fn pbar_order(desc: &GlobalFieldDesc, p: u64) -> Result<PBarReport, GlobalError> {
    if p < 11 || !is_prime(p) {
        return Err(GlobalError::PrimeTooSmall(p));
    }
    let n = odd(p + 1);
    let killed = odd(desc.w2.gcd(&(p + 1)));
    let three_divides = (p + 1).is_multiple_of(3);
    let c_quotient_order = (desc.kind == FieldKind::Rationals).then(|| {
        let c = odd(6u64.gcd(&p.div_ceil(2)));
        if three_divides {
            n / c
        } else {
            n
        }
    });
    Ok(PBarReport {
        p,
        p_plus_one_odd: n,
        killed,
        pbar_odd_order: n / killed,
        three_divides,
        c_quotient_order,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub p: u64,
    pub p_odd_order: u64,
    pub c_order: u64,
    pub quotient_odd_order: u64,
    pub report: PBarReport,
    pub ok: bool,
}

/// Recomputes `P(GF(p))[1/2] / <c>` from the presentation and compares with [`pbar_order`].
pub fn pbar_cross_check(p: u64) -> Result<CrossCheck, GlobalError> {
    let report = pbar_order(&GlobalFieldDesc::rationals(), p)?;
    let ring = RingHandle::parse(&format!("gf({p})")).expect("prime field");
    let ctx = ScissorsContext::new(&ring)?;
    let pb = ctx.pre_bloch();
    let p_odd_order = pb.odd_torsion_order().to_u64().expect("small");
    let c = ctx.p_vector(&ctx.c_const());
    let c_order = pb.element_order(&c).expect("torsion").to_u64().expect("small");
    let quotient_odd_order = p_odd_order / odd(c_order);
    let trivial_when_prime_to_3 = report.three_divides || odd(c_order) == 1;
    let ok = report.consistent()
        && p_odd_order == report.p_plus_one_odd
        && quotient_odd_order == report.pbar_odd_order
        && c_order == 6u64.gcd(&p.div_ceil(2))
        && trivial_when_prime_to_3;
    Ok(CrossCheck { p, p_odd_order, c_order, quotient_odd_order, report, ok })
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_parts() {
        assert_eq!(odd_part(12).unwrap(), 3);
        assert_eq!(odd_part(24).unwrap(), 3);
        assert_eq!(odd_part(7).unwrap(), 7);
        assert!(odd_part(0).is_err());
    }

    #[test]
    fn k3() {
        let q = GlobalFieldDesc::rationals();
        assert_eq!(k3_image_order(&q, 11, false).unwrap(), 6);
        assert_eq!(k3_image_order(&q, 13, false).unwrap(), 1);
        assert_eq!(k3_image_formula(24, 16, true), 1);
        assert!(matches!(k3_image_order(&q, 16, true), Err(GlobalError::CharDividesW2 { .. })));
        assert!(k3_image_order(&q, 9, false).is_err());
        assert_eq!(k3_image_order(&GlobalFieldDesc::with_w2(5).unwrap(), 9, false).unwrap(), 5);
        for q0 in [5u64, 7, 11, 13, 17, 19, 23, 25, 29] {
            assert_eq!(q0.div_ceil(2) % k3_image_order(&q, q0, false).unwrap(), 0);
        }
    }

    #[test]
    fn pbar_examples() {
        let q = GlobalFieldDesc::rationals();
        let r = pbar_order(&q, 11).unwrap();
        assert_eq!((r.p_plus_one_odd, r.killed, r.pbar_odd_order), (3, 3, 1));
        let r = pbar_order(&q, 13).unwrap();
        assert_eq!((r.p_plus_one_odd, r.killed, r.pbar_odd_order), (7, 1, 7));
        let r = pbar_order(&q, 29).unwrap();
        assert_eq!((r.p_plus_one_odd, r.killed, r.pbar_odd_order), (15, 3, 5));
        assert!(pbar_order(&q, 7).is_err());
        for p in primes_between(11, 97) {
            assert!(pbar_order(&q, p).unwrap().consistent(), "{p}");
        }
    }

    #[test]
    fn cross_checks() {
        for p in [11, 13, 17] {
            let c = pbar_cross_check(p).unwrap();
            assert!(c.ok, "{c:?}");
        }
        assert_eq!(pbar_cross_check(11).unwrap().c_order, 6);
        assert_eq!(pbar_cross_check(17).unwrap().quotient_odd_order, 3);
    }
}
