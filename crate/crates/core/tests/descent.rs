mod common;

use std::collections::BTreeSet;

use common::*;
use ggs_core::descent::{locate_b, recover_a, theta_config, verify_locate};
use ggs_core::{Params, Word};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn locate_on_random_b_coset() {
    let p = p0();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let len = rng.gen_range(1..=6);
        let x = conjugate_product(&p, &mut rng, len, 1);
        assert!(x.blength() <= 6);
        let cert = locate_b(&p, &x, 4).unwrap_or_else(|e| panic!("{x}: {e}"));
        assert!(cert.vertex.path.len() <= 4);
        assert!(cert.delta.to_i64().unwrap().rem_euclid(3) != 0);
        assert!(verify_locate(&p, &x, &cert).unwrap(), "{x}");
    }
}

/// `(b^r)^{a^i} (b^{-r})^{a^j}`.
fn base_word(p: &Params, r: i64, i: i64, j: i64) -> Word {
    Word::b_conj(p, 0, r, i).mul(&Word::b_conj(p, 0, -r, j))
}

#[test]
fn recover_base_cases() {
    for p in [p0(), p1()] {
        let n = theta_config(&p, None).unwrap().n as i64;
        let d = p.d() as i64;
        let mut cases = BTreeSet::new();
        for delta in [1, 2] {
            for r in [-4, -2, -1, 1, 2, 4] {
                for i in 0..d {
                    for j in (0..d).filter(|&j| j != i) {
                        let z = base_word(&p, r, i, j);
                        let cert = recover_a(&p, delta, &z, 10).unwrap_or_else(|e| panic!("{z}: {e}"));
                        assert!(cert.verified, "{z}");
                        cases.insert(if i == n {
                            2
                        } else if j == n {
                            3
                        } else {
                            1
                        });
                    }
                }
            }
        }
        assert_eq!(cases.into_iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        let id = recover_a(&p, 1, &Word::identity(&p, 0), 10).unwrap();
        assert!(id.verified && id.k == 0);
    }
}

#[test]
fn recover_case_two_lambda() {
    let p = p0();
    let n = theta_config(&p, None).unwrap().n as i64;
    let cert = recover_a(&p, 1, &base_word(&p, 2, n, n + 1), 10).unwrap();
    assert!(cert.verified);
    assert_eq!((cert.k, cert.lambda.abs().to_i64().unwrap()), (1, 2));
}

#[test]
fn recover_random_derived() {
    let p = p0();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let len = [2usize, 3, 4][rng.gen_range(0..3)];
        let z = conjugate_product(&p, &mut rng, len, 0);
        assert!(z.blength() <= 4);
        let cert = recover_a(&p, 1, &z, 10).unwrap_or_else(|e| panic!("{z}: {e}"));
        assert!(cert.verified, "{z}");
    }
}

#[test]
fn recover_rejects_outside_derived() {
    let p = p0();
    let err = recover_a(&p, 1, &nf(&p, "b"), 10).unwrap_err();
    assert_eq!(err.code(), "NOT_IN_DERIVED");
    assert_eq!(recover_a(&p, 3, &Word::identity(&p, 0), 10).unwrap_err().code(), "BAD_INPUT");
}
