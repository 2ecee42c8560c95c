#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use ggs_core::beauville::{invariant_rule, Rule};
use ggs_core::quotients::{encode, enumerate_small_quotient, GroupTable, DEFAULT_SIZE_CAP};
use ggs_core::{Params, Portrait, Vertex, Word, WordExpr};
use num_bigint::BigInt;
use rand::Rng;

pub fn p0() -> Params {
    Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap()
}

pub fn p1() -> Params {
    Params::new(3, vec![1, 2, 3], vec![1, 1]).unwrap()
}

pub fn nf(params: &Params, src: &str) -> Word {
    WordExpr::parse(src).unwrap().normalize(params, 0).unwrap()
}

/// Alternating a- and b-syllables with small exponents.
pub fn random_word(params: &Params, rng: &mut impl Rng, syllables: usize) -> Word {
    let mut w = Word::identity(params, 0);
    for _ in 0..syllables {
        if rng.gen_bool(0.5) {
            w = w.mul(&Word::a_pow(params, 0, rng.gen_range(-2..=2)));
        } else {
            w = w.mul(&Word::b_pow(params, 0, rng.gen_range(-4i64..=4)));
        }
    }
    w
}

/// Product of `len` conjugates `(b^β)^{a^t}` with exponents summing to `total`.
pub fn conjugate_product(params: &Params, rng: &mut impl Rng, len: usize, total: i64) -> Word {
    let d = params.d() as i64;
    let mut betas: Vec<i64> = (0..len)
        .map(|_| loop {
            let b = rng.gen_range(-4..=4);
            if b != 0 {
                break b;
            }
        })
        .collect();
    let s: i64 = betas.iter().sum();
    if let Some(last) = betas.last_mut() {
        *last += total - s;
    }
    betas.iter().fold(Word::identity(params, 0), |acc, &b| acc.mul(&Word::b_conj(params, 0, b, rng.gen_range(0..d))))
}

/// Moves `w` into the first-level stabiliser by appending an a-power.
pub fn into_stabiliser(params: &Params, w: &Word) -> Word {
    let (ea, _) = w.exponent_maps();
    w.mul(&Word::a_pow(params, 0, -(ea as i64)))
}

/// Section contraction, ε_b additivity and portrait consistency of the
/// first-level sections of the stabiliser part of `w`.
pub fn check_sections(params: &Params, w: &Word) {
    let g = into_stabiliser(params, w);
    let n = params.levels();
    let secs = g.first_level_sections(params).unwrap();
    let len = g.blength();
    let total: usize = secs.iter().map(Word::blength).sum();
    assert!(total <= len, "{g}: {total} > {len}");
    for s in &secs {
        assert!(s.blength() <= len.div_ceil(2), "{g}: section {s}");
    }
    let eb_sum: BigInt = secs.iter().map(|s| s.exponent_maps().1).sum();
    assert_eq!(eb_sum, g.exponent_maps().1);
    let port = g.evaluate(params, n).unwrap();
    for (j, s) in secs.iter().enumerate() {
        let from_portrait = port.section(&Vertex::new(0, vec![j as u64 + 1])).unwrap();
        assert_eq!(s.evaluate(params, n - 1).unwrap(), from_portrait, "{g} at {}", j + 1);
    }
}

pub fn all_depths_identity(params: &Params, w: &Word) -> bool {
    (1..=params.levels()).all(|d| w.evaluate(params, d).unwrap().is_identity())
}

/// One generator per subgroup of order p.
pub fn order_p_subgroups(params: &Params, table: &GroupTable) -> Vec<Portrait> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for z in table.elements() {
        if z.is_identity() || !z.pow_u64(params.p()).is_identity() {
            continue;
        }
        let key: BTreeSet<String> = (1..params.p()).map(|k| encode(&z.pow_u64(k))).collect();
        if seen.insert(key) {
            reps.push(z.clone());
        }
    }
    reps
}

pub struct Agreement {
    pub pairs: usize,
    pub certified: HashMap<Rule, usize>,
    pub violations: usize,
}

pub fn rule_agreement(params: &Params) -> (usize, Agreement) {
    let table = enumerate_small_quotient(params, 2, DEFAULT_SIZE_CAP).unwrap();
    let class = table.conjugacy_classes();
    let class_of = |f: &Portrait| class[table.index_of(f).unwrap()];
    let reps = order_p_subgroups(params, &table);
    let mut out = Agreement { pairs: 0, certified: HashMap::new(), violations: 0 };
    for zu in &reps {
        let powers: BTreeSet<usize> = (1..params.p()).map(|k| class_of(&zu.pow_u64(k))).collect();
        for zv in &reps {
            out.pairs += 1;
            let disjoint = !powers.contains(&class_of(zv));
            if let Some((rule, _)) = invariant_rule(params, zu, zv) {
                *out.certified.entry(rule).or_default() += 1;
                out.violations += (!disjoint) as usize;
            }
        }
    }
    (table.len(), out)
}
