mod common;

use common::*;
use ggs_core::{Params, Triviality, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word_strategy() -> impl Strategy<Value = Vec<(bool, i64)>> {
    prop::collection::vec((any::<bool>(), -4i64..=4), 0..12)
}

fn build(params: &Params, syl: &[(bool, i64)]) -> Word {
    syl.iter().fold(Word::identity(params, 0), |w, &(is_a, k)| {
        if is_a {
            w.mul(&Word::a_pow(params, 0, k))
        } else {
            w.mul(&Word::b_pow(params, 0, k))
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn blength_subadditive(x in word_strategy(), y in word_strategy()) {
        let p = p0();
        let (u, v) = (build(&p, &x), build(&p, &y));
        prop_assert!(u.mul(&v).blength() <= u.blength() + v.blength());
    }

    #[test]
    fn sections_contract(x in word_strategy()) {
        for p in [p0(), p1()] {
            check_sections(&p, &build(&p, &x));
        }
    }

    #[test]
    fn inverse_cancels(x in word_strategy()) {
        let p = p0();
        let u = build(&p, &x);
        prop_assert!(u.mul(&u.inverse()).is_empty());
        prop_assert_eq!(u.inverse().evaluate(&p, 3).unwrap(), u.evaluate(&p, 3).unwrap().invert());
    }

    #[test]
    fn evaluation_is_a_homomorphism(x in word_strategy(), y in word_strategy()) {
        let p = p1();
        let (u, v) = (build(&p, &x), build(&p, &y));
        let lhs = u.mul(&v).evaluate(&p, 3).unwrap();
        let rhs = u.evaluate(&p, 3).unwrap().compose(&v.evaluate(&p, 3).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn triviality_matches_portraits(x in word_strategy()) {
        let p = p0();
        let u = build(&p, &x);
        let t = u.is_trivial(&p);
        prop_assert_ne!(t, Triviality::Undecided);
        prop_assert_eq!(t == Triviality::Trivial, all_depths_identity(&p, &u));
    }
}

#[test]
fn thousand_seeded_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [p0(), p1()] {
        let mut trivial = 0;
        for _ in 0..1000 {
            let u = random_word(&p, &mut rng, 10);
            let v = random_word(&p, &mut rng, 10);
            assert!(u.mul(&v).blength() <= u.blength() + v.blength());
            check_sections(&p, &u);
            let t = u.is_trivial(&p);
            assert_ne!(t, Triviality::Undecided, "{u}");
            assert_eq!(t == Triviality::Trivial, all_depths_identity(&p, &u), "{u}");
            trivial += (t == Triviality::Trivial) as usize;
        }
        assert!(trivial > 0);
    }
}

/// Portraits only see the prefix: past it, the recursive test is the
/// finer one.
#[test]
fn prefix_horizon() {
    let p = p1();
    let n = p.levels();
    // b^{p^{m_N}} vanishes on every portrait yet b has infinite order.
    let b = Word::b_pow(&p, 0, p.degree(n - 1));
    assert!(all_depths_identity(&p, &b));
    assert_eq!(b.is_trivial(&p), Triviality::NonTrivial);
}
