use num_bigint::BigInt;
use scissors_core::groups::{compute_group, GroupName};
use scissors_core::linalg::iso_odd;
use scissors_core::ring::RingHandle;
use scissors_core::scissors::ScissorsContext;

fn ring(d: &str) -> RingHandle {
    RingHandle::parse(d).unwrap()
}

fn odd_order(d: &str, g: GroupName) -> BigInt {
    compute_group(g, &ring(d)).unwrap().odd_torsion_order()
}

#[test]
fn pre_bloch_odd_orders_of_fields() {
    for q in [4u64, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27] {
        let (p, e) = scissors_core::ring::prime_power(q).unwrap();
        let d = if e == 1 { format!("gf({p})") } else { format!("gf({p}^{e})") };
        let n = q + 1;
        assert_eq!(odd_order(&d, GroupName::P), BigInt::from(n >> n.trailing_zeros()), "{d}");
    }
}

#[test]
fn bloch_agrees_with_rp1_on_local_rings() {
    for d in ["z/25", "z/49", "gf(5)[t]/t^2"] {
        let c = ScissorsContext::new(&ring(d)).unwrap();
        assert!(iso_odd(c.rp1(), c.bloch()), "{d}");
        assert!(iso_odd(c.rb(), c.rp1()), "{d}");
    }
}

#[test]
fn witt_structures() {
    let gw = compute_group(GroupName::Gw, &ring("gf(7)")).unwrap();
    assert_eq!(gw.structure(), "Z/2 + Z");
    assert_eq!(compute_group(GroupName::I, &ring("gf(13)")).unwrap().structure(), "Z/2");
    assert!(compute_group(GroupName::I2, &ring("gf(9)")).unwrap().is_trivial());
}

#[test]
fn orbit_homology() {
    let r = ring("gf(7)");
    assert!(compute_group(GroupName::H1, &r).unwrap().is_trivial());
    assert_eq!(compute_group(GroupName::H2, &r).unwrap().structure(), "Z/2");
}

#[test]
fn small_rings_are_rejected() {
    assert!(compute_group(GroupName::P, &ring("gf(3)")).is_err());
    assert!(compute_group(GroupName::RpModL, &ring("gf(7)")).is_err());
}

#[test]
fn lb_quotient_matches_residue() {
    let q = compute_group(GroupName::RpModL, &ring("z/49")).unwrap();
    let k = compute_group(GroupName::RpTilde, &ring("gf(7)")).unwrap();
    assert_eq!(q.structure(), k.structure());
}
