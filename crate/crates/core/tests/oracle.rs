mod common;

use common::*;
use ggs_core::beauville::oracle_disjoint;
use ggs_core::quotients::{enumerate_small_quotient, fingerprint_report, DEFAULT_SIZE_CAP};

#[test]
fn level_two_tables() {
    let p = p0();
    let t = enumerate_small_quotient(&p, 2, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!(t.len(), 243);
    let t1 = enumerate_small_quotient(&p1(), 2, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!(t1.len(), 2187);
    assert_eq!(enumerate_small_quotient(&p, 3, DEFAULT_SIZE_CAP).unwrap_err().code(), "CAP_EXCEEDED");
}

#[test]
fn fingerprint_is_sound() {
    for p in [p0(), p1()] {
        let t = enumerate_small_quotient(&p, 2, DEFAULT_SIZE_CAP).unwrap();
        let r = fingerprint_report(&t);
        assert!(r.sound, "{r:?}");
        assert_eq!(r.table_size, t.len());
    }
}

#[test]
fn invariant_rules_agree_with_exhaustive_search() {
    for p in [p0(), p1()] {
        let (_, a) = rule_agreement(&p);
        assert!(a.pairs > 0);
        assert_eq!(a.violations, 0);
        assert!(a.certified.values().sum::<usize>() > 0, "{:?}", a.certified);
    }
}

#[test]
fn oracle_disjoint_matches_classes() {
    let p = p0();
    let table = enumerate_small_quotient(&p, 2, DEFAULT_SIZE_CAP).unwrap();
    let class = table.conjugacy_classes();
    let reps = order_p_subgroups(&p, &table);
    for zu in &reps {
        for zv in &reps {
            let by_class = (1..p.p())
                .all(|k| class[table.index_of(&zu.pow_u64(k)).unwrap()] != class[table.index_of(zv).unwrap()]);
            assert_eq!(oracle_disjoint(&p, &table, zu, zv).unwrap(), by_class);
        }
    }
}

#[test]
fn generation_against_closure() {
    use ggs_core::beauville::{generation_check, GeneratingPair, GenerationVerdict};
    let p = p0();
    for (x, y, ok) in [("a^-2", "a*b", true), ("a*b^2", "b", true), ("a", "a*b^3", false), ("b", "b^2", false)] {
        let pair = GeneratingPair::new(nf(&p, x), nf(&p, y));
        let r = generation_check(&p, &pair, 2).unwrap();
        assert_eq!(r.verdict == GenerationVerdict::NecessaryOk, ok, "{x}, {y}");
        assert_eq!(r.generates_quotient, Some(ok));
    }
}
