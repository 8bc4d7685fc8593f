//! `GW(R) = Z[G_R] / <<<u>><<1-u>>>`, the fundamental ideal `I(R)` and `I^2(R)`.

use num_bigint::BigInt;

use crate::group_ring::RElem;
use crate::linalg::{normalize, FpAb, IntMat, SparseRow, Subgroup};
use crate::ring::RingHandle;
use crate::scissors::ScissorsError;

#[derive(Clone, Debug)]
pub struct WittContext {
    ring: RingHandle,
    rank: u32,
    gw: FpAb,
    i: Subgroup,
    i2: Subgroup,
}

fn row(r: &RElem) -> SparseRow {
    normalize(r.terms().map(|(g, c)| (*g as usize, BigInt::from(*c))).collect())
}

impl WittContext {
    pub fn new(ring: &RingHandle) -> Result<WittContext, ScissorsError> {
        if ring.w().is_empty() {
            return Err(ScissorsError::RingTooSmall(format!("W is empty for {}", ring.descriptor())));
        }
        let rank = ring.square_classes().rank;
        let n = 1usize << rank;
        let one = ring.one();
        let mut rels = IntMat::zeros(0, n);
        for &u in ring.w() {
            let s = RElem::pfister(ring.class_of(u)).mul(&RElem::pfister(ring.class_of(ring.sub(one, u))));
            for h in 0..n as u32 {
                rels.push_row(row(&s.shift(&h)));
            }
        }
        let gw = FpAb::new(n, rels)?;
        let i_gens: Vec<SparseRow> = (1..n as u32).map(|g| row(&RElem::pfister(g))).collect();
        let i = gw.subgroup(&i_gens);
        let mut i2_gens = Vec::new();
        for a in 1..n as u32 {
            for b in 1..n as u32 {
                let p = RElem::pfister(a).mul(&RElem::pfister(b));
                for h in 0..n as u32 {
                    i2_gens.push(row(&p.shift(&h)));
                }
            }
        }
        let i2 = gw.subgroup(&i2_gens);
        Ok(WittContext { ring: ring.clone(), rank, gw, i, i2 })
    }

    pub fn ring(&self) -> &RingHandle {
        &self.ring
    }

    pub fn gw(&self) -> &FpAb {
        &self.gw
    }

    pub fn fundamental_ideal(&self) -> &FpAb {
        &self.i.group
    }

    pub fn i_squared(&self) -> &FpAb {
        &self.i2.group
    }

    pub fn fundamental_ideal_sub(&self) -> &Subgroup {
        &self.i
    }

    /// Product of square-class generators: `<g><h> = <gh>`.
    pub fn mul_table(&self) -> Vec<Vec<u32>> {
        let n = 1u32 << self.rank;
        (0..n).map(|g| (0..n).map(|h| g ^ h).collect()).collect()
    }

    /// Rank (augmentation) of a class of `GW`, well defined since relations have augmentation 0.
    pub fn rank_of(&self, x: &RElem) -> i64 {
        x.augmentation()
    }
}

pub fn gw(r: &RingHandle) -> Result<FpAb, ScissorsError> {
    Ok(WittContext::new(r)?.gw)
}

pub fn fundamental_ideal(r: &RingHandle) -> Result<FpAb, ScissorsError> {
    Ok(WittContext::new(r)?.i.group)
}

pub fn i_squared(r: &RingHandle) -> Result<FpAb, ScissorsError> {
    Ok(WittContext::new(r)?.i2.group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ring(d: &str) -> RingHandle {
        RingHandle::parse(d).unwrap()
    }

    #[test]
    fn gf7() {
        let w = WittContext::new(&ring("gf(7)")).unwrap();
        assert_eq!(w.gw().structure(), "Z/2 + Z");
        assert_eq!(w.fundamental_ideal().structure(), "Z/2");
        assert!(w.i_squared().is_trivial());
    }

    #[test]
    fn i_squared_vanishes() {
        for d in ["gf(11)", "gf(13)", "gf(9)", "gf(8)"] {
            assert!(i_squared(&ring(d)).unwrap().is_trivial(), "{d}");
        }
    }

    #[test]
    fn augmentation_kills_i() {
        let w = WittContext::new(&ring("gf(13)")).unwrap();
        let incl = w.fundamental_ideal_sub().inclusion.matrix();
        for r in incl.rows() {
            let s: BigInt = r.iter().map(|(_, c)| c.clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn empty_w() {
        assert!(gw(&ring("gf(2)")).is_err());
    }
}
