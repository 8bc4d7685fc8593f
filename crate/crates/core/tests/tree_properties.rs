use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scissors_core::tree::*;

#[test]
fn balls_for_p_up_to_13() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let max_r = if p <= 5 { 4 } else { 3 };
        for r in 0..=max_r {
            let b = ball(&VertexKey::lambda0(), r, p);
            assert_eq!(b.vertices.len() as u64, ball_size(p, r), "p={p} r={r}");
            assert_eq!(b.cycles(), 0, "p={p} r={r}");
        }
    }
}

#[test]
fn ball_around_other_center() {
    let c = VertexKey::A { a: 3, c: 5.into() };
    let b = ball(&c, 2, 7);
    assert_eq!(b.vertices.len() as u64, ball_size(7, 2));
    assert!(b.vertices.iter().all(|v| distance(&c, v, 7) <= 2));
}

#[test]
fn spec_matrix_examples() {
    let p = 7;
    let g = Mat2::parse("1,1/7;0,1").unwrap();
    assert_eq!(distance(&VertexKey::lambda0(), &act(&g, &VertexKey::lambda0(), p).unwrap(), p), 2);
    assert!(in_g1(&g, p));
    let w = amalgam_decompose(&g, p).unwrap();
    assert_eq!(w.product(), g);
    let d = Mat2::parse("2,0;0,1/2").unwrap();
    assert!(gamma_membership(&d, 1, p).unwrap());
    assert!(!gamma_membership(&d, 2, p).unwrap());
    assert!(Mat2::parse("1,2;3").is_err());
    assert!(Mat2::parse("1,2;3,x").is_err());
}

#[test]
fn g_pi_conjugates_g0_into_g1() {
    let p = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gp = Mat2::g_pi(p);
    let gpi = gp.inv().unwrap();
    for _ in 0..50 {
        let g = random_sl2(&mut rng, p, 0);
        assert!(in_g0(&g, p));
        assert!(in_g1(&gp.mul(&g).mul(&gpi), p));
    }
}

#[test]
fn minus_identity_is_one_factor() {
    let w = amalgam_decompose(&Mat2::from_i64(-1, 0, 0, -1), 5).unwrap();
    assert_eq!(w.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn keys_are_class_invariants(seed in any::<u64>()) {
        let p = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_gl2(&mut rng, p);
        let k = random_sl2(&mut rng, p, 0);
        let s = Mat2::scalar(num_rational::BigRational::from_integer(49.into()));
        let key = canonical_vertex(&Lattice { basis: m.clone() }, p).unwrap();
        prop_assert_eq!(canonical_vertex(&Lattice { basis: m.mul(&k) }, p).unwrap(), key.clone());
        prop_assert_eq!(canonical_vertex(&Lattice { basis: s.mul(&m) }, p).unwrap(), key.clone());
        prop_assert_eq!(canonical_vertex(&Lattice { basis: key.basis(p) }, p).unwrap(), key);
    }

    #[test]
    fn distance_is_a_metric(seed in any::<u64>()) {
        let p = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || canonical_vertex(&Lattice { basis: random_gl2(&mut rng, p) }, p).unwrap();
        let (a, b, c) = (v(), v(), v());
        prop_assert_eq!(distance(&a, &b, p), distance(&b, &a, p));
        prop_assert!(distance(&a, &c, p) <= distance(&a, &b, p) + distance(&b, &c, p));
        prop_assert_eq!(distance(&a, &a, p), 0);
    }

    #[test]
    fn action_is_isometric(seed in any::<u64>()) {
        let p = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gl2(&mut rng, p);
        let a = canonical_vertex(&Lattice { basis: random_gl2(&mut rng, p) }, p).unwrap();
        let b = canonical_vertex(&Lattice { basis: random_gl2(&mut rng, p) }, p).unwrap();
        prop_assert_eq!(distance(&act(&g, &a, p).unwrap(), &act(&g, &b, p).unwrap(), p), distance(&a, &b, p));
    }
}
