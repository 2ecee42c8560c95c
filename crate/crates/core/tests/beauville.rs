mod common;

use common::*;
use ggs_core::beauville::*;
use ggs_core::{Params, Portrait};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn certified(v: &BeauvilleVerdict) -> &[DisjointnessCertificate] {
    match v {
        BeauvilleVerdict::CertifiedBeauville { certificates, .. } => certificates,
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_sum_certified_at_every_level_from_three() {
    let p = p0();
    for n in 3..=4 {
        let v = beauville_verdict(&p, n, None).unwrap();
        let certs = certified(&v);
        assert_eq!(certs.len(), 9);
        for rule in [Rule::RootLabel, Rule::SupportCount, Rule::KeyCongruence] {
            assert!(certs.iter().any(|c| c.rule == rule), "n={n} missing {rule:?}");
        }
    }
    for n in 1..=2 {
        assert!(matches!(beauville_verdict(&p, n, None).unwrap(), BeauvilleVerdict::Inconclusive { .. }));
    }
}

/// Random conjugators never move `⟨z_u⟩` onto `⟨z_v⟩` for key-congruence
/// certificates. A falsification search: the quotient is too large to
/// enumerate at this level.
#[test]
fn key_certificates_survive_random_conjugation() {
    let p = p0();
    let n = 3;
    let (p1, p2) = default_zero_sum_pairs(&p);
    let certs = sigma_disjoint(&p, &p1, &p2, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let conjugators: Vec<Portrait> = (0..300)
        .map(|_| {
            let len = rng.gen_range(1..12);
            random_word(&p, &mut rng, len).evaluate(&p, n).unwrap()
        })
        .collect();
    let mut checked = 0;
    for c in certs.iter().filter(|c| matches!(c.rule, Rule::KeyCongruence | Rule::KeyCongruenceExt)) {
        let zu = order_p_generator(&p, &nf(&p, &c.u).evaluate(&p, n).unwrap()).unwrap();
        let zv = order_p_generator(&p, &nf(&p, &c.v).evaluate(&p, n).unwrap()).unwrap();
        for g in &conjugators {
            for k in 1..p.p() {
                assert_ne!(zu.pow_u64(k).conjugate(g).unwrap(), zv, "{} vs {}", c.u, c.v);
            }
        }
        checked += 1;
    }
    assert!(checked >= 2);
}

#[test]
fn key_congruence_hypotheses() {
    let p = p0();
    assert!(!key_congruence(&p, 1, 0, 2, 0, 3).unwrap());
    assert!(key_congruence(&p, 10, 0, 1, 0, 3).unwrap());
    assert_eq!(key_congruence(&p, 1, 2, 1, 0, 3).unwrap_err().code(), "HYPOTHESIS_VIOLATION");
}

#[test]
fn nonzero_sum_obstructed() {
    let p = p1();
    for n in 1..=3 {
        let v = beauville_verdict(&p, n, None).unwrap();
        let BeauvilleVerdict::NotBeauville { obstruction } = v else { panic!("{v:?}") };
        assert!(obstruction.equal_subgroups && obstruction.central);
    }
    for n in 2..=3 {
        let c = center_witness(&p, n).unwrap();
        assert!(c.commutes_with_a && c.commutes_with_b);
        assert_eq!(c.order, BigUint::from(p.degree(n - 1)));
        assert_eq!(c.expected_order, p.degree(n - 1));
    }
}

#[test]
fn not_in_f_is_an_error() {
    let p = Params::new(3, vec![1, 2, 3], vec![3, 6]).unwrap();
    assert_eq!(beauville_verdict(&p, 3, None).unwrap_err().code(), "NOT_IN_F");
}

#[test]
fn verdict_serialises_with_caveat() {
    let v = beauville_verdict(&p0(), 3, None).unwrap();
    let json = serde_json::to_string(&v).unwrap();
    assert!(json.contains("\"verdict\":\"CERTIFIED_BEAUVILLE\""));
    assert!(json.contains(GENERATION_CAVEAT));
}
