//! Verification suites: each check recomputes a finite identity or group
//! structure and reports whether it holds exactly.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::global::{k3_image_order, pbar_cross_check, primes_between, GlobalFieldDesc};
use crate::group_ring::RElem;
use crate::linalg::{iso, iso_odd};
use crate::orbit::build_row_complex;
use crate::ring::RingHandle;
use crate::scissors::{RPElem, ScissorsContext};
use crate::tree::{
    act, amalgam_decompose, ball, ball_size, canonical_vertex, distance, random_gl2, random_sl2, val,
    Lattice, VertexKey,
};
use crate::valuation::{qclass, vp, y_rel_q, QRElem, SymRP, ValuationContext};
use crate::witt::WittContext;

pub const DEFAULT_SEED: u64 = 0x5C15_5085;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    fn error(name: impl Into<String>, e: impl std::fmt::Display) -> Check {
        Check::new(name, false, format!("error: {e}"))
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Folds several checks into one line, keeping the details of failures.
pub fn summarize(name: &str, checks: &[Check]) -> Check {
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if failed.is_empty() {
        Check::new(name, true, format!("{} checks", checks.len()))
    } else {
        Check::new(name, false, failed.join("; "))
    }
}

fn ctx(desc: &str) -> Result<ScissorsContext, String> {
    let r = RingHandle::parse(desc).map_err(|e| e.to_string())?;
    ScissorsContext::new(&r).map_err(|e| e.to_string())
}

fn odd_of(n: u64) -> u64 {
    n >> n.trailing_zeros()
}

fn show(v: &[BigInt]) -> String {
    format!("{:?}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

/// `P(GF(p))[1/2] = Z/(p+1)'`.
pub fn pre_bloch_order(p: u64) -> Check {
    let name = format!("pre-bloch gf({p})");
    match ctx(&format!("gf({p})")) {
        Ok(c) => {
            let n = odd_of(p + 1);
            let got = c.pre_bloch().odd_invariants();
            let want: Vec<BigInt> = if n == 1 { vec![] } else { vec![BigInt::from(n)] };
            Check::new(name, got == want, format!("odd part {} expected {}", show(&got), show(&want)))
        }
        Err(e) => Check::error(name, e),
    }
}

pub fn criterion1() -> Check {
    let t = Instant::now();
    let checks: Vec<Check> = primes_between(11, 97).into_par_iter().map(pre_bloch_order).collect();
    let mut s = summarize("pre-bloch orders 11..97", &checks);
    s.detail = format!("{} in {:.1}s", s.detail, t.elapsed().as_secs_f64());
    s
}

/// `RP_1`, `RB`, `B` and `P` agree after inverting 2.
pub fn refined_agreement(desc: &str) -> Check {
    let name = format!("refined/classical {desc}");
    match ctx(desc) {
        Ok(c) => {
            let g = [c.rp1(), c.rb(), c.bloch(), c.pre_bloch()];
            let ok = (0..4).all(|i| (i + 1..4).all(|j| iso_odd(g[i], g[j])));
            let d = format!(
                "RP1 {} RB {} B {} P {}",
                g[0].structure(),
                g[1].structure(),
                g[2].structure(),
                g[3].structure()
            );
            Check::new(name, ok, d)
        }
        Err(e) => Check::error(name, e),
    }
}

pub const CRITERION_FIELDS: [&str; 8] =
    ["gf(11)", "gf(13)", "gf(17)", "gf(19)", "gf(23)", "gf(25)", "gf(49)", "gf(121)"];

pub fn criterion2() -> Check {
    let checks: Vec<Check> = CRITERION_FIELDS.par_iter().map(|d| refined_agreement(d)).collect();
    summarize("refined/classical agreement", &checks)
}

/// `p_{-1}^+ RP(k)` against `RP_1(k)` after inverting 2.
pub fn idempotent(desc: &str) -> Check {
    let name = format!("idempotent {desc}");
    match ctx(desc) {
        Ok(c) => {
            let plus = c.refined().plus_part(c.class(c.minus_one())).group;
            let ok = iso_odd(&plus, c.rp1());
            Check::new(name, ok, format!("plus part {} RP1 {}", plus.structure(), c.rp1().structure()))
        }
        Err(e) => Check::error(name, e),
    }
}

pub fn criterion3() -> Check {
    let checks: Vec<Check> = CRITERION_FIELDS.par_iter().map(|d| idempotent(d)).collect();
    summarize("plus part against RP1", &checks)
}

/// The special-element identities over all units of one ring.
pub fn special_elements(desc: &str) -> Vec<Check> {
    let c = match ctx(desc) {
        Ok(c) => c,
        Err(e) => return vec![Check::error(format!("special elements {desc}"), e)],
    };
    let r = c.ring().clone();
    let cc = c.big_c();
    let class = |a| c.class(a);
    let mut out = Vec::new();

    let mut bad = Vec::new();
    for &a in r.units() {
        let x = cc.act(&RElem::pfister(class(a))).scale(2).sub(&c.psi1(a).unwrap()).add(&c.psi2(a).unwrap());
        if !c.rp_is_zero(&x) {
            bad.push(r.format(a));
        }
    }
    out.push(Check::new(format!("key identity {desc}"), bad.is_empty(), fails(&bad)));

    let tb = c.tilde_quotients();
    let mut bad = Vec::new();
    match &tb {
        Ok(tb) => {
            for &a in c.w() {
                let rhs = RPElem::sym(a)
                    .act(&RElem::class(class(r.sub(a, r.one()))).mul(&RElem::pfister(class(r.neg(a)))));
                let x = cc.act(&RElem::pfister(class(a))).sub(&rhs);
                if !tb.rp.is_zero(&c.rp_vector(&x)) {
                    bad.push(r.format(a));
                }
            }
            out.push(Check::new(format!("<<a>>C in tilde quotient {desc}"), bad.is_empty(), fails(&bad)));
        }
        Err(e) => out.push(Check::error(format!("<<a>>C in tilde quotient {desc}"), e)),
    }

    let psi = c.psi1(c.minus_one()).unwrap();
    out.push(Check::new(format!("3C = psi1(-1) {desc}"), c.rp_is_zero(&cc.scale(3).sub(&psi)), ""));
    out.push(Check::new(format!("6C = 0 {desc}"), c.rp_is_zero(&cc.scale(6)), ""));

    let units = r.units();
    let psi1: Vec<RPElem> = units.iter().map(|&a| c.psi1(a).unwrap()).collect();
    let psi2: Vec<RPElem> = units.iter().map(|&a| c.psi2(a).unwrap()).collect();
    let pos: std::collections::HashMap<_, usize> = units.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let idx = |x| pos[&x];
    let bad: usize = units
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let ga = RElem::class(class(a));
            units
                .iter()
                .enumerate()
                .filter(|&(j, &b)| {
                    let ab = idx(r.mul(a, b));
                    let x = psi1[ab].sub(&psi1[j].act(&ga)).sub(&psi1[i]);
                    let y = psi2[ab].sub(&psi2[j].act(&ga)).sub(&psi2[i]);
                    !c.rp_is_zero(&x) || !c.rp_is_zero(&y)
                })
                .count()
        })
        .sum();
    out.push(Check::new(
        format!("cocycle law {desc}"),
        bad == 0,
        format!("{bad} failing pairs of {}", units.len() * units.len()),
    ));

    let bad: Vec<String> = c
        .w()
        .iter()
        .filter(|&&a| !c.rp_is_zero(&c.big_c_at(a).sub(&cc)) || !c.p_is_zero(&c.c_const_at(a).sub(&c.c_const())))
        .map(|&a| r.format(a))
        .collect();
    out.push(Check::new(format!("base-point independence {desc}"), bad.is_empty(), fails(&bad)));

    let pm = RElem::p_plus(class(c.minus_one()));
    let mut bad = Vec::new();
    let mut negated = true;
    for (i, &a) in units.iter().enumerate() {
        let want = pm.mul(&RElem::pfister(class(a)));
        let l1 = c.lambda1_of(&psi1[i]);
        let l2 = c.lambda1_of(&psi2[i]);
        if l1 != want || l2 != want {
            bad.push(r.format(a));
        }
        let neg = want.scale(-1);
        negated &= l1 == neg && l2 == neg;
    }
    let detail = if bad.is_empty() {
        String::new()
    } else {
        format!("{}; observed lambda1(psi_i(a)) = -p+<<a>> for all a: {negated}", fails(&bad))
    };
    out.push(Check::new(format!("lambda1(psi_i(a)) = p+<<a>> {desc}"), bad.is_empty(), detail));
    out
}

fn fails(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else if bad.len() <= 6 {
        format!("fails at {}", bad.join(", "))
    } else {
        format!("fails at {} and {} more", bad[..6].join(", "), bad.len() - 6)
    }
}

pub const SPECIAL_RINGS: [&str; 6] = ["gf(7)", "gf(11)", "gf(13)", "z/49", "z/121", "gf(5)[t]/t^2"];

pub fn criterion4() -> Check {
    let checks: Vec<Check> = SPECIAL_RINGS.par_iter().flat_map(|d| special_elements(d)).collect();
    summarize("special-element identities", &checks)
}

/// `c` has order `gcd(6, (p+1)/2)` in `P(GF(p))`.
pub fn c_order(p: u64) -> Check {
    let name = format!("c-order gf({p})");
    match ctx(&format!("gf({p})")) {
        Ok(c) => {
            let got = c.p_order(&c.c_const());
            let want = num_integer::gcd(6, p.div_ceil(2));
            let ok = got.as_ref().and_then(|x| x.to_u64()) == Some(want);
            Check::new(name, ok, format!("order {got:?} expected {want}"))
        }
        Err(e) => Check::error(name, e),
    }
}

pub fn criterion5() -> Check {
    let checks: Vec<Check> = primes_between(11, 97).into_par_iter().map(c_order).collect();
    summarize("c-order 11..97", &checks)
}

/// `R~P(B)/L_B ≅ R~P(k)` through the reduction map.
pub fn slr(desc: &str) -> Check {
    let name = format!("slr {desc}");
    match ctx(desc).and_then(|c| c.l_submodule().map_err(|e| e.to_string())) {
        Ok(l) => Check::new(
            name,
            l.map_is_iso && l.same_invariants,
            format!(
                "quotient {} residue {} map iso {}",
                l.quotient.structure(),
                l.residue.structure(),
                l.map_is_iso
            ),
        ),
        Err(e) => Check::error(name, e),
    }
}

pub const SLR_RINGS: [&str; 4] = ["z/49", "z/121", "gf(5)[t]/t^2", "gf(7)[t]/t^2"];

pub fn criterion6() -> Check {
    let checks: Vec<Check> = SLR_RINGS.par_iter().map(|d| slr(d)).collect();
    summarize("short exact sequence mod L_B", &checks)
}

/// Orbit-complex homology against `0`, `I(k)` and `RP_1(k)`, and `I^2(k) = 0`.
pub fn orbit_identifications(desc: &str) -> Vec<Check> {
    let run = || -> Result<Vec<Check>, String> {
        let r = RingHandle::parse(desc).map_err(|e| e.to_string())?;
        let cx = build_row_complex(&r).map_err(|e| e.to_string())?;
        let w = WittContext::new(&r).map_err(|e| e.to_string())?;
        let c = ScissorsContext::new(&r).map_err(|e| e.to_string())?;
        let h = |i| cx.homology_at(i).map_err(|e| e.to_string());
        let (h1, h2, h3) = (h(1)?, h(2)?, h(3)?);
        Ok(vec![
            Check::new(format!("complex {desc}"), cx.is_complex(), ""),
            Check::new(format!("H1 = 0 {desc}"), h1.is_trivial(), h1.structure()),
            Check::new(
                format!("H2 = I {desc}"),
                iso(&h2, w.fundamental_ideal()),
                format!("{} vs {}", h2.structure(), w.fundamental_ideal().structure()),
            ),
            Check::new(
                format!("H3 ~ RP1 {desc}"),
                iso_odd(&h3, c.rp1()),
                format!("{} vs {}", h3.structure(), c.rp1().structure()),
            ),
            Check::new(format!("I^2 = 0 {desc}"), w.i_squared().is_trivial(), w.i_squared().structure()),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::error(format!("orbit {desc}"), e)])
}

pub const ORBIT_FIELDS: [&str; 4] = ["gf(7)", "gf(11)", "gf(13)", "gf(25)"];

pub fn criterion7() -> Check {
    let checks: Vec<Check> = ORBIT_FIELDS.par_iter().flat_map(|d| orbit_identifications(d)).collect();
    summarize("orbit-complex identifications", &checks)
}

/// Specialization checks at `p` with the given sample counts.
pub fn specialization(p: u64, seed: u64, n_y: usize, n_eta: usize) -> Vec<Check> {
    let v = match ValuationContext::new(p) {
        Ok(v) => v,
        Err(e) => return vec![Check::error(format!("specialization p={p}"), e)],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let mut out = Vec::new();

    let pairs: Vec<_> = (0..n_y).map(|_| v.random_pair(&mut rng)).collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .filter(|(a, b)| !y_rel_q(a, b).and_then(|y| v.kills(&y)).unwrap_or(false))
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    out.push(Check::new(format!("S_v kills Y p={p}"), bad.is_empty(), format!("{n_y} samples {}", fails(&bad))));

    let span = v.span_matches_rp1();
    out.push(Check::new(
        format!("delta_pi(<<p>>g(a)) spans RP1 p={p}"),
        matches!(span, Ok(true)),
        format!("{span:?}"),
    ));

    let mut bad = 0;
    for _ in 0..n_eta {
        let x = v.random_ideal_elem(&mut rng, 3);
        let ok = match (v.eta_pi(&x), v.eta_pi_prime(&x)) {
            (Ok(e), Ok(e2)) => {
                let s: Vec<BigInt> = e2.iter().zip(&e).map(|(a, b)| a + b * BigInt::from(2)).collect();
                v.p_is_zero(&s)
            }
            _ => false,
        };
        bad += usize::from(!ok);
    }
    out.push(Check::new(format!("eta' = -2 eta p={p}"), bad == 0, format!("{bad} of {n_eta} fail")));

    let mut bad = 0;
    for _ in 0..n_eta {
        let u = loop {
            let u = v.random_rat(&mut rng);
            if vp(&u, p) == Ok(0) {
                break u;
            }
        };
        let s = v.random_rat(&mut rng);
        let x = SymRP::sym(s).act(&QRElem::pfister(qclass(&u).expect("nonzero")));
        let ok = v.delta_pi(&x).map(|d| v.rp_is_zero(&d)).unwrap_or(false);
        bad += usize::from(!ok);
    }
    out.push(Check::new(format!("delta_pi trivial on unit classes p={p}"), bad == 0, format!("{bad} of {n_eta} fail")));
    out
}

pub fn criterion8(seed: u64) -> Check {
    let checks: Vec<Check> = [11u64, 13].par_iter().flat_map(|&p| specialization(p, seed, 500, 200)).collect();
    summarize("specialization suite", &checks)
}

/// Ball sizes and acyclicity for `r <= max_r`, the parity law and amalgam round trips.
pub fn tree_suite(p: u64, seed: u64, max_r: u32, n_parity: usize, n_amalgam: usize) -> Vec<Check> {
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for r in 0..=max_r {
        let b = ball(&VertexKey::lambda0(), r, p);
        if b.vertices.len() as u64 != ball_size(p, r) || b.cycles() != 0 {
            bad.push(format!("r={r}: {} vertices {} cycles", b.vertices.len(), b.cycles()));
        }
    }
    out.push(Check::new(format!("ball sizes p={p} r<={max_r}"), bad.is_empty(), bad.join(", ")));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p << 8));
    let samples: Vec<_> = (0..n_parity).map(|_| (random_gl2(&mut rng, p), random_gl2(&mut rng, p))).collect();
    let bad = samples
        .par_iter()
        .filter(|(g, m)| {
            let v = canonical_vertex(&Lattice { basis: m.clone() }, p).expect("nonsingular");
            let w = act(g, &v, p).expect("nonsingular");
            let dv = val(&g.det(), p).expect("nonsingular");
            (distance(&v, &w, p) as i64 - dv).rem_euclid(2) != 0
        })
        .count();
    out.push(Check::new(format!("parity law p={p}"), bad == 0, format!("{bad} of {n_parity} fail")));

    let mats: Vec<_> = (0..n_amalgam).map(|_| random_sl2(&mut rng, p, 4)).collect();
    let bad = mats
        .par_iter()
        .filter(|g| match amalgam_decompose(g, p) {
            Ok(w) => {
                let bound = distance(&VertexKey::lambda0(), &act(g, &VertexKey::lambda0(), p).unwrap(), p) + 1;
                !(w.product() == **g && w.alternates() && w.members_ok(p) && w.len() as u64 <= bound)
            }
            Err(_) => true,
        })
        .count();
    out.push(Check::new(format!("amalgam round trip p={p}"), bad == 0, format!("{bad} of {n_amalgam} fail")));
    out
}

pub fn criterion9(seed: u64) -> Check {
    let checks: Vec<Check> = [5u64, 7, 11].par_iter().flat_map(|&p| tree_suite(p, seed, 4, 1000, 500)).collect();
    summarize("tree and amalgam suite", &checks)
}

pub fn global_suite(p_min: u64, p_max: u64) -> Vec<Check> {
    let mut out: Vec<Check> = primes_between(p_min.max(11), p_max)
        .into_par_iter()
        .map(|p| match pbar_cross_check(p) {
            Ok(c) => Check::new(
                format!("pbar cross-check p={p}"),
                c.ok,
                format!("P odd {} c order {} quotient {}", c.p_odd_order, c.c_order, c.quotient_odd_order),
            ),
            Err(e) => Check::error(format!("pbar cross-check p={p}"), e),
        })
        .collect();
    let q = GlobalFieldDesc::rationals();
    for (qq, want) in [(11u64, 6u64), (13, 1)] {
        let got = k3_image_order(&q, qq, false);
        out.push(Check::new(format!("k3 image order Q q={qq}"), matches!(got, Ok(x) if x == want), format!("{got:?}")));
    }
    out
}

pub fn criterion10() -> Check {
    summarize("global tables", &global_suite(11, 97))
}

/// All ten acceptance criteria in order.
pub fn acceptance(seed: u64) -> Vec<Check> {
    vec![
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(seed),
        criterion9(seed),
        criterion10(),
    ]
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 11] = [
    "pre-bloch",
    "refined",
    "idempotent",
    "key-identity",
    "special-elements",
    "c-order",
    "slr",
    "orbit",
    "specialization",
    "tree",
    "global",
];

/// Runs one named suite against one ring.
pub fn run_suite(suite: &str, desc: &str, seed: u64) -> Result<Vec<Check>, String> {
    let r = RingHandle::parse(desc).map_err(|e| format!("ring '{desc}': {e}"))?;
    let prime_field = || (r.is_field() && r.size() == r.p()).then_some(r.p()).ok_or(format!("{suite} needs gf(p), got {desc}"));
    Ok(match suite {
        "pre-bloch" => vec![pre_bloch_order(prime_field()?)],
        "refined" => vec![refined_agreement(desc)],
        "idempotent" => vec![idempotent(desc)],
        "key-identity" => special_elements(desc).into_iter().take(1).collect(),
        "special-elements" => special_elements(desc),
        "c-order" => vec![c_order(prime_field()?)],
        "slr" => vec![slr(desc)],
        "orbit" => orbit_identifications(desc),
        "specialization" => specialization(prime_field()?, seed, 500, 200),
        "tree" => tree_suite(prime_field()?, seed, 3, 1000, 500),
        "global" => {
            let p = prime_field()?;
            global_suite(p, p)
        }
        _ => return Err(format!("unknown suite {suite}; expected one of {}", SUITES.join(", "))),
    })
}

/// Suites applicable to a ring.
pub fn suites_for(r: &RingHandle) -> Vec<&'static str> {
    let q = r.residue_order();
    let prime = r.is_field() && r.size() == r.p();
    let mut v = Vec::new();
    if q > 3 {
        if prime && r.p() >= 11 {
            v.extend(["pre-bloch", "c-order", "specialization", "global"]);
        }
        v.extend(["refined", "special-elements"]);
        if r.is_field() {
            v.extend(["idempotent", "orbit"]);
        } else if q >= 5 {
            v.push("slr");
        }
    }
    if prime {
        v.push("tree");
    }
    v
}

/// Rings used by `verify-all`: fields with `q <= max_q` and the square-zero and
/// `Z/p^2` extensions whose size stays within `max_q^2`.
pub fn verify_all_rings(max_q: u64) -> Vec<String> {
    let mut out = Vec::new();
    for q in 4..=max_q {
        if let Some((p, e)) = crate::ring::prime_power(q) {
            out.push(if e == 1 { format!("gf({p})") } else { format!("gf({p}^{e})") });
            if e == 1 && (5..=11).contains(&p) {
                out.push(format!("z/{p}^2"));
                out.push(format!("gf({p})[t]/t^2"));
            }
        }
    }
    out
}
