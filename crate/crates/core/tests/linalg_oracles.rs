use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use scissors_core::linalg::{hnf, invariant_factors, iso, iso_odd, snf, FpAb, IntMat};

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn known_smith_forms() {
    let m = IntMat::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    assert_eq!(invariant_factors(&m), big(&[2, 6, 12]));
    let m = IntMat::from_i64(&[vec![6, 0], vec![0, 4]]);
    assert_eq!(invariant_factors(&m), big(&[2, 12]));
    assert!(invariant_factors(&IntMat::from_i64(&[vec![1, 0], vec![0, -1]])).is_empty());
}

#[test]
fn group_structures() {
    let g = FpAb::new(3, IntMat::from_i64(&[vec![6, 0, 0], vec![0, 4, 0]])).unwrap();
    assert_eq!(g.structure(), "Z/2 + Z/12 + Z");
    assert_eq!(g.odd_invariants(), big(&[3]));
    let h = FpAb::from_invariants(&big(&[4, 6]), 1);
    assert!(iso(&g, &h) == (g.structure() == h.structure()));
    assert!(iso_odd(&FpAb::cyclic(6), &FpAb::cyclic(3)));
    assert!(!iso_odd(&FpAb::cyclic(9), &FpAb::cyclic(3)));
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_by_two_minors(a in -30i64..=30, b in -30i64..=30, c in -30i64..=30, d in -30i64..=30) {
        let m = IntMat::from_i64(&[vec![a, b], vec![c, d]]);
        let g = [a, b, c, d].iter().fold(0i64, |x, y| x.gcd(y));
        let det = (a * d - b * c).abs();
        let s = snf(&m);
        let diag: Vec<BigInt> = s.diagonal.iter().map(|x| x.abs()).collect();
        prop_assert_eq!(diag[0].clone(), BigInt::from(g));
        if det != 0 {
            prop_assert_eq!(&diag[0] * &diag[1], BigInt::from(det));
        } else {
            prop_assert!(diag[1].is_zero());
        }
    }

    #[test]
    fn smith_transforms(rows in small_matrix()) {
        let m = IntMat::from_i64(&rows);
        let s = snf(&m);
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        for w in s.diagonal[..s.rank].windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn hermite_preserves_lattice(rows in small_matrix()) {
        let m = IntMat::from_i64(&rows);
        let h = hnf(&m);
        let ncols = m.ncols();
        let a = FpAb::new(ncols, m).unwrap();
        let b = FpAb::new(ncols, h).unwrap();
        prop_assert!(iso(&a, &b));
    }
}
