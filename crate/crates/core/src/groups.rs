//! Named groups attached to a ring, for the command line and the C interface.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::linalg::FpAb;
use crate::orbit::build_row_complex;
use crate::ring::RingHandle;
use crate::scissors::ScissorsContext;
use crate::witt::WittContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupName {
    P,
    B,
    Rp,
    Rp1,
    Rb,
    S2,
    RpPlus,
    Gw,
    I,
    I2,
    PTilde,
    RpTilde,
    Rp1Tilde,
    RbTilde,
    RpPrime,
    RpModL,
    H1,
    H2,
    H3,
}

pub const GROUP_NAMES: [(&str, GroupName); 19] = [
    ("P", GroupName::P),
    ("B", GroupName::B),
    ("RP", GroupName::Rp),
    ("RP1", GroupName::Rp1),
    ("RB", GroupName::Rb),
    ("S2", GroupName::S2),
    ("RP+", GroupName::RpPlus),
    ("GW", GroupName::Gw),
    ("I", GroupName::I),
    ("I2", GroupName::I2),
    ("P~", GroupName::PTilde),
    ("RP~", GroupName::RpTilde),
    ("RP1~", GroupName::Rp1Tilde),
    ("RB~", GroupName::RbTilde),
    ("RP'", GroupName::RpPrime),
    ("RP~/L", GroupName::RpModL),
    ("H1", GroupName::H1),
    ("H2", GroupName::H2),
    ("H3", GroupName::H3),
];

impl FromStr for GroupName {
    type Err = String;

    fn from_str(s: &str) -> Result<GroupName, String> {
        let t = s.trim().to_ascii_uppercase().replace("TILDE", "~").replace("PRIME", "'").replace("PLUS", "+");
        GROUP_NAMES.iter().find(|(n, _)| *n == t).map(|(_, g)| *g).ok_or_else(|| {
            let names: Vec<&str> = GROUP_NAMES.iter().map(|(n, _)| *n).collect();
            format!("unknown group {s}; expected one of {}", names.join(", "))
        })
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = GROUP_NAMES.iter().find(|(_, g)| g == self).map(|(n, _)| *n).unwrap_or("?");
        f.write_str(n)
    }
}

pub fn compute_group(which: GroupName, ring: &RingHandle) -> Result<FpAb, String> {
    let e = |x: &dyn fmt::Display| x.to_string();
    let sc = || ScissorsContext::new(ring).map_err(|x| e(&x));
    let wc = || WittContext::new(ring).map_err(|x| e(&x));
    let homology = |i| {
        build_row_complex(ring).and_then(|c| c.homology_at(i)).map_err(|x| e(&x))
    };
    Ok(match which {
        GroupName::P => sc()?.pre_bloch().clone(),
        GroupName::B => sc()?.bloch().clone(),
        GroupName::Rp => sc()?.refined().flat().clone(),
        GroupName::Rp1 => sc()?.rp1().clone(),
        GroupName::Rb => sc()?.rb().clone(),
        GroupName::S2 => sc()?.s2_of_units().clone(),
        GroupName::RpPlus => {
            let c = sc()?;
            c.refined().plus_part(c.class(c.minus_one())).group
        }
        GroupName::Gw => wc()?.gw().clone(),
        GroupName::I => wc()?.fundamental_ideal().clone(),
        GroupName::I2 => wc()?.i_squared().clone(),
        GroupName::PTilde => sc()?.p_tilde(),
        GroupName::RpTilde => sc()?.rp_tilde(),
        GroupName::Rp1Tilde => sc()?.tilde_quotients().map_err(|x| e(&x))?.rp1.group,
        GroupName::RbTilde => sc()?.tilde_quotients().map_err(|x| e(&x))?.rb.group,
        GroupName::RpPrime => sc()?.rp_prime().map_err(|x| e(&x))?.module.flat().clone(),
        GroupName::RpModL => sc()?.l_submodule().map_err(|x| e(&x))?.quotient,
        GroupName::H1 => homology(1)?,
        GroupName::H2 => homology(2)?,
        GroupName::H3 => homology(3)?,
    })
}

/// Machine-readable description of a computed group.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GroupReport {
    pub ring: String,
    pub group: String,
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
    pub odd_part: Vec<u64>,
    pub structure: String,
}

impl GroupReport {
    pub fn new(ring: &RingHandle, which: GroupName, g: &FpAb) -> Result<GroupReport, String> {
        let small = |v: Vec<BigInt>| -> Result<Vec<u64>, String> {
            v.iter().map(|d| u64::try_from(d).map_err(|_| format!("invariant factor {d} exceeds u64"))).collect()
        };
        Ok(GroupReport {
            ring: ring.descriptor(),
            group: which.to_string(),
            invariant_factors: small(g.invariant_factors())?,
            free_rank: g.free_rank(),
            odd_part: small(g.odd_invariants())?,
            structure: g.structure(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for (n, g) in GROUP_NAMES {
            assert_eq!(n.parse::<GroupName>().unwrap(), g);
            assert_eq!(g.to_string(), n);
        }
        assert_eq!("rp1tilde".parse::<GroupName>().unwrap(), GroupName::Rp1Tilde);
        assert!("XYZ".parse::<GroupName>().is_err());
    }

    #[test]
    fn rp1_gf11() {
        let r = RingHandle::parse("gf(11)").unwrap();
        let g = compute_group(GroupName::Rp1, &r).unwrap();
        let rep = GroupReport::new(&r, GroupName::Rp1, &g).unwrap();
        assert_eq!(rep.odd_part, vec![3]);
        assert_eq!(rep.group, "RP1");
    }
}
