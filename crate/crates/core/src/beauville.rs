//! Beauville structures on `G/st_G(n)`: generation checks, disjointness
//! certificates for the Σ-sets of two generating triples, and the
//! centre-based obstruction for vectors of non-zero sum.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{pow_u64, reduce_big};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::quotients::{conjugacy_invariants, enumerate_small_quotient, is_central, GroupTable, DEFAULT_SIZE_CAP};
use crate::tree::Portrait;
use crate::vectors::classify_vector;
use crate::word::{Syllable, Word};

pub const GENERATION_CAVEAT: &str =
    "NECESSARY: independent exponent maps mod p and generation of G/st(2) are necessary conditions; \
     generation of the full quotient is not separately proved";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingPair {
    pub x: Word,
    pub y: Word,
}

impl GeneratingPair {
    pub fn new(x: Word, y: Word) -> Self {
        GeneratingPair { x, y }
    }

    /// `(x, y, xy)`.
    pub fn triple(&self) -> [Word; 3] {
        [self.x.clone(), self.y.clone(), self.x.mul(&self.y)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GenerationVerdict {
    NecessaryOk,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub verdict: GenerationVerdict,
    pub mod_p_independent: bool,
    /// Level of the enumerated quotient used, if any.
    pub quotient_level: Option<usize>,
    pub generates_quotient: Option<bool>,
    pub caveat: String,
}

fn mod_p_exponents(params: &Params, w: &Word) -> (u64, u64) {
    let p = params.p();
    let (ea, eb) = w.exponent_maps();
    (ea % p, reduce_big(&eb, p))
}

fn independent_mod_p(params: &Params, x: &Word, y: &Word) -> bool {
    let p = params.p() as i128;
    let (a1, b1) = mod_p_exponents(params, x);
    let (a2, b2) = mod_p_exponents(params, y);
    (a1 as i128 * b2 as i128 - a2 as i128 * b1 as i128).rem_euclid(p) != 0
}

pub fn generation_check(params: &Params, pair: &GeneratingPair, n: usize) -> Result<GenerationReport> {
    params.check_range(pair.x.shift(), n)?;
    let indep = independent_mod_p(params, &pair.x, &pair.y);
    let level = n.min(2);
    let generates = match enumerate_small_quotient(params, level, DEFAULT_SIZE_CAP) {
        Ok(table) => {
            let gens = vec![pair.x.evaluate(params, level)?, pair.y.evaluate(params, level)?];
            let closure = crate::quotients::subgroup_closure(gens, &table.elements()[0]);
            Some(closure.len() == table.len())
        }
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let ok = indep && generates != Some(false);
    Ok(GenerationReport {
        verdict: if ok { GenerationVerdict::NecessaryOk } else { GenerationVerdict::Fail },
        mod_p_independent: indep,
        quotient_level: generates.map(|_| level),
        generates_quotient: generates,
        caveat: GENERATION_CAVEAT.to_string(),
    })
}

fn zero_sum_in_f(params: &Params) -> Result<()> {
    let r = classify_vector(params);
    if !r.in_f || !r.sum_zero {
        return Err(Error::HypothesisViolation("requires a zero-sum defining vector in F".into()));
    }
    Ok(())
}

/// `ip^s ≡ jp^t mod p^{m_2}`; `false` certifies that the order-p subgroups
/// generated by powers of `ab^{ip^s}` and `ab^{jp^t}` are not conjugate.
pub fn key_congruence(params: &Params, i: u64, s: u32, j: u64, t: u32, n: usize) -> Result<bool> {
    zero_sum_in_f(params)?;
    let p = params.p();
    if n < 3 || n > params.levels() {
        return Err(Error::HypothesisViolation(format!("level n = {n} must satisfy 3 <= n <= N")));
    }
    let mn = params.degree(n - 1);
    for (x, e) in [(i, s), (j, t)] {
        if x == 0 || x >= mn || x % p == 0 {
            return Err(Error::HypothesisViolation(format!("{x} must be a unit below p^m_n = {mn}")));
        }
        if e >= params.m()[1] {
            return Err(Error::HypothesisViolation(format!("exponent {e} must be below m2 = {}", params.m()[1])));
        }
    }
    let m2 = params.degree(1) as i128;
    let lhs = i as i128 * pow_u64(p, s) as i128;
    let rhs = j as i128 * pow_u64(p, t) as i128;
    Ok((lhs - rhs).rem_euclid(m2) == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    /// One of the two cyclic subgroups is trivial in the quotient.
    TrivialSubgroup,
    RootLabel,
    SupportCount,
    OrderTree,
    LevelSums,
    KeyCongruence,
    KeyCongruenceExt,
    Oracle,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessCertificate {
    pub u: String,
    pub v: String,
    pub rule: Rule,
    pub detail: String,
    /// Set for KEY_CONGRUENCE_EXT, which extends the key congruence to `a^{-1}b^c`
    /// by assertion rather than proof.
    pub asserted_extension: bool,
}

/// The unique subgroup of order p of `⟨f⟩`, as its generator `f^{ord/p}`;
/// `None` when `f` is trivial.
pub fn order_p_generator(params: &Params, f: &Portrait) -> Option<Portrait> {
    let ord = f.order(params.p());
    if ord.is_one() {
        return None;
    }
    Some(f.power(&BigInt::from(ord / params.p())))
}

/// Conjugacy invariants that separate the order-p subgroups of `⟨fu⟩` and
/// `⟨fv⟩`, in rule order. Sound: conjugate subgroups have `z_v = (z_u^k)^g`
/// for some `k`, and every listed invariant is a class function.
pub fn invariant_rule(params: &Params, fu: &Portrait, fv: &Portrait) -> Option<(Rule, String)> {
    let (Some(zu), Some(zv)) = (order_p_generator(params, fu), order_p_generator(params, fv)) else {
        return Some((Rule::TrivialSubgroup, "one cyclic subgroup is trivial".into()));
    };
    let p = params.p();
    let rv = conjugacy_invariants(params, &zv);
    let ru: Vec<_> = (1..p).map(|k| conjugacy_invariants(params, &zu.pow_u64(k))).collect();
    if ru.iter().all(|r| r.root_label != rv.root_label) {
        let labels: Vec<_> = ru.iter().map(|r| r.root_label).collect();
        return Some((Rule::RootLabel, format!("root label {} vs {:?}", rv.root_label, labels)));
    }
    if ru.iter().all(|r| r.support_count != rv.support_count) {
        let counts: Vec<_> = ru.iter().map(|r| r.support_count).collect();
        return Some((Rule::SupportCount, format!("support {:?} vs {:?}", rv.support_count, counts)));
    }
    if ru.iter().all(|r| r.order_tree_code != rv.order_tree_code) {
        return Some((Rule::OrderTree, format!("order tree {} differs from all powers", rv.order_tree_code)));
    }
    if ru.iter().all(|r| r.level_sums != rv.level_sums) {
        let sums: Vec<_> = ru.iter().map(|r| r.level_sums.clone()).collect();
        return Some((Rule::LevelSums, format!("level sums {:?} vs {:?}", rv.level_sums, sums)));
    }
    None
}

/// Exhaustive check in an enumerated quotient: no conjugate of a generator
/// of the order-p subgroup of `⟨fu⟩` lies in `⟨fv⟩`.
pub fn oracle_disjoint(params: &Params, table: &GroupTable, fu: &Portrait, fv: &Portrait) -> Result<bool> {
    let (Some(zu), Some(zv)) = (order_p_generator(params, fu), order_p_generator(params, fv)) else {
        return Ok(true);
    };
    let targets: HashSet<Portrait> = (1..params.p()).map(|k| zv.pow_u64(k)).collect();
    for g in table.elements() {
        if targets.contains(&zu.conjugate(g)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(sign of the a-exponent, c)` for words of shape `a^{±1} b^c`.
fn ab_shape(w: &Word) -> Option<(i64, BigInt)> {
    match w.syllables().as_slice() {
        [Syllable::A(1), Syllable::B(c)] => Some((1, c.clone())),
        [Syllable::A(s), Syllable::B(c)] if *s == w.modulus() - 1 => Some((-1, c.clone())),
        _ => None,
    }
}

/// Splits `c = i p^s` with `p ∤ i`.
fn split_unit(c: &BigInt, p: u64) -> Option<(u64, u32)> {
    if c.is_zero() || c < &BigInt::zero() {
        return None;
    }
    let mut i = c.clone();
    let mut s = 0;
    let pb = BigInt::from(p);
    while i.is_multiple_of(&pb) {
        i /= &pb;
        s += 1;
    }
    Some((i.to_u64()?, s))
}

fn key_rule(params: &Params, u: &Word, v: &Word, n: usize) -> Option<(Rule, String)> {
    let (su, cu) = ab_shape(u)?;
    let (sv, cv) = ab_shape(v)?;
    let p = params.p();
    let (i, s) = split_unit(&cu, p)?;
    let (j, t) = split_unit(&cv, p)?;
    match key_congruence(params, i, s, j, t, n) {
        Ok(false) => {
            let rule = if su == 1 && sv == 1 { Rule::KeyCongruence } else { Rule::KeyCongruenceExt };
            Some((rule, format!("{i}*{p}^{s} != {j}*{p}^{t} mod p^m2")))
        }
        _ => None,
    }
}

pub fn sigma_disjoint(
    params: &Params,
    p1: &GeneratingPair,
    p2: &GeneratingPair,
    n: usize,
) -> Result<Vec<DisjointnessCertificate>> {
    params.check_range(p1.x.shift(), n)?;
    let table = enumerate_small_quotient(params, n, DEFAULT_SIZE_CAP).ok();
    let mut out = Vec::with_capacity(9);
    for u in p1.triple() {
        for v in p2.triple() {
            let fu = u.evaluate(params, n)?;
            let fv = v.evaluate(params, n)?;
            let found = invariant_rule(params, &fu, &fv).or_else(|| key_rule(params, &u, &v, n));
            let found = match (found, &table) {
                (Some(f), _) => Some(f),
                (None, Some(t)) if oracle_disjoint(params, t, &fu, &fv)? => {
                    Some((Rule::Oracle, format!("exhaustive search over {} elements", t.len())))
                }
                _ => None,
            };
            let (rule, detail) = found.unwrap_or((Rule::Inconclusive, "no rule applies".into()));
            out.push(DisjointnessCertificate {
                u: u.to_string(),
                v: v.to_string(),
                rule,
                detail,
                asserted_extension: rule == Rule::KeyCongruenceExt,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterWitness {
    pub word: Word,
    /// `t_{n-1} = m_1 + ⋯ + m_{n-1}`.
    pub t: u32,
    pub commutes_with_a: bool,
    pub commutes_with_b: bool,
    #[serde(with = "crate::bigserde::big_uint")]
    pub order: BigUint,
    pub expected_order: u64,
}

fn nonzero_sum(params: &Params) -> Result<()> {
    let s: i128 = params.e().iter().map(|&x| x as i128).sum();
    if s.rem_euclid(params.p() as i128) == 0 {
        return Err(Error::HypothesisViolation("requires a defining vector sum prime to p".into()));
    }
    Ok(())
}

fn t_before(params: &Params, n: usize) -> u32 {
    params.m()[..n - 1].iter().sum()
}

/// `(ab)^{p^{t_{n-1}}}` together with portrait checks of centrality and order.
pub fn center_witness(params: &Params, n: usize) -> Result<CenterWitness> {
    nonzero_sum(params)?;
    if n < 2 || n > params.levels() {
        return Err(Error::HypothesisViolation(format!("level n = {n} must satisfy 2 <= n <= N")));
    }
    let t = t_before(params, n);
    let ab = Word::a(params, 0).mul(&Word::b(params, 0));
    let word = ab.pow(&BigInt::from(params.p()).pow(t));
    let f = word.evaluate(params, n)?;
    let a = Portrait::generator_a(params, 0, n)?;
    let b = Portrait::generator_b(params, 0, n)?;
    Ok(CenterWitness {
        t,
        commutes_with_a: f.commutator(&a)?.is_identity(),
        commutes_with_b: f.commutator(&b)?.is_identity(),
        order: f.order(params.p()),
        expected_order: params.degree(n - 1),
        word,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub z1: String,
    pub z2: String,
    #[serde(with = "crate::bigserde::big_uint")]
    pub exponent: BigUint,
    #[serde(with = "crate::bigserde::big_uint")]
    pub subgroup_order: BigUint,
    pub equal_subgroups: bool,
    pub central: bool,
}

/// For sums prime to p: members `z_1`, `z_2` of the two triples with both
/// exponent maps units mod p, whose `p^{t_{n-1}}`-th powers generate the same
/// (central) cyclic subgroup, so the Σ-sets meet.
pub fn non_beauville_obstruction(
    params: &Params,
    n: usize,
    p1: &GeneratingPair,
    p2: &GeneratingPair,
) -> Result<Obstruction> {
    nonzero_sum(params)?;
    if n == 0 || n > params.levels() {
        return Err(Error::HypothesisViolation(format!("level n = {n} outside 1..=N")));
    }
    let p = params.p();
    let pick = |pair: &GeneratingPair| -> Result<Word> {
        if !independent_mod_p(params, &pair.x, &pair.y) {
            return Err(Error::HypothesisViolation("pair fails the mod-p generation test".into()));
        }
        pair.triple()
            .into_iter()
            .find(|w| {
                let (ea, eb) = mod_p_exponents(params, w);
                ea != 0 && eb != 0
            })
            .ok_or_else(|| Error::HypothesisViolation("no triple member in a unit coset".into()))
    };
    let z1 = pick(p1)?;
    let z2 = pick(p2)?;
    let exponent = BigUint::from(p).pow(t_before(params, n));
    let e = BigInt::from(exponent.clone());
    let w1 = z1.pow(&e);
    let f1 = w1.evaluate(params, n)?;
    let f2 = z2.pow(&e).evaluate(params, n)?;
    let ord = f1.order(p);
    let powers = cyclic_powers(&f1);
    let equal = powers.contains(&f2) && f2.order(p) == ord;
    Ok(Obstruction {
        z1: z1.to_string(),
        z2: z2.to_string(),
        exponent,
        subgroup_order: ord,
        equal_subgroups: equal,
        central: is_central(params, &w1, n)?,
    })
}

fn cyclic_powers(f: &Portrait) -> HashSet<Portrait> {
    let mut set = HashSet::new();
    let mut x = f.one();
    loop {
        set.insert(x.clone());
        x = x.compose(f).expect("same shape");
        if x.is_identity() {
            return set;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BeauvilleVerdict {
    CertifiedBeauville { generation: Vec<GenerationReport>, certificates: Vec<DisjointnessCertificate> },
    NotBeauville { obstruction: Obstruction },
    Inconclusive { reason: String, generation: Vec<GenerationReport>, certificates: Vec<DisjointnessCertificate> },
}

/// `({a^{-2}, ab}, {ab^2, b})`.
pub fn default_zero_sum_pairs(params: &Params) -> (GeneratingPair, GeneratingPair) {
    let a = |s| Word::a_pow(params, 0, s);
    let b = |s: i64| Word::b_pow(params, 0, s);
    (GeneratingPair::new(a(-2), a(1).mul(&b(1))), GeneratingPair::new(a(1).mul(&b(2)), b(1)))
}

/// `({a, b}, {ab, b^{-1}a})`.
pub fn default_nonzero_sum_pairs(params: &Params) -> (GeneratingPair, GeneratingPair) {
    let a = Word::a(params, 0);
    let b = Word::b(params, 0);
    (GeneratingPair::new(a.clone(), b.clone()), GeneratingPair::new(a.mul(&b), b.inverse().mul(&a)))
}

pub fn beauville_verdict(
    params: &Params,
    n: usize,
    pairs: Option<(GeneratingPair, GeneratingPair)>,
) -> Result<BeauvilleVerdict> {
    let report = classify_vector(params);
    if !report.in_f {
        return Err(Error::NotInF);
    }
    params.check_range(0, n)?;
    if report.sum_nonzero_mod_p {
        let (p1, p2) = pairs.unwrap_or_else(|| default_nonzero_sum_pairs(params));
        let obstruction = non_beauville_obstruction(params, n, &p1, &p2)?;
        return Ok(BeauvilleVerdict::NotBeauville { obstruction });
    }
    let (p1, p2) = pairs.unwrap_or_else(|| default_zero_sum_pairs(params));
    if !report.sum_zero {
        return Ok(inconclusive("sum divisible by p but not zero", vec![], vec![]));
    }
    if n < 3 {
        return Ok(inconclusive("levels 1 and 2 are outside the zero-sum criterion", vec![], vec![]));
    }
    let generation = vec![generation_check(params, &p1, n)?, generation_check(params, &p2, n)?];
    let certificates = sigma_disjoint(params, &p1, &p2, n)?;
    if generation.iter().any(|g| g.verdict == GenerationVerdict::Fail) {
        return Ok(inconclusive("a pair fails the generation check", generation, certificates));
    }
    if certificates.iter().any(|c| c.rule == Rule::Inconclusive) {
        return Ok(inconclusive("some pair has no disjointness certificate", generation, certificates));
    }
    Ok(BeauvilleVerdict::CertifiedBeauville { generation, certificates })
}

fn inconclusive(
    reason: &str,
    generation: Vec<GenerationReport>,
    certificates: Vec<DisjointnessCertificate>,
) -> BeauvilleVerdict {
    BeauvilleVerdict::Inconclusive { reason: reason.into(), generation, certificates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::WordExpr;

    fn p0() -> Params {
        Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap()
    }

    fn p1() -> Params {
        Params::new(3, vec![1, 2, 3], vec![1, 1]).unwrap()
    }

    fn w(p: &Params, s: &str) -> Word {
        WordExpr::parse(s).unwrap().normalize(p, 0).unwrap()
    }

    fn pair(p: &Params, x: &str, y: &str) -> GeneratingPair {
        GeneratingPair::new(w(p, x), w(p, y))
    }

    #[test]
    fn generation_examples() {
        let p = p0();
        let ok = generation_check(&p, &pair(&p, "a^-2", "a*b"), 3).unwrap();
        assert_eq!(ok.verdict, GenerationVerdict::NecessaryOk);
        assert_eq!(ok.generates_quotient, Some(true));
        assert!(ok.caveat.starts_with("NECESSARY"));
        let bad = generation_check(&p, &pair(&p, "a", "a*b^3"), 3).unwrap();
        assert_eq!(bad.verdict, GenerationVerdict::Fail);
        let bad = generation_check(&p, &pair(&p, "b", "b^2"), 3).unwrap();
        assert_eq!(bad.verdict, GenerationVerdict::Fail);
        assert_eq!(generation_check(&p, &pair(&p, "a", "b"), 5).unwrap_err().code(), "OUT_OF_PREFIX");
    }

    #[test]
    fn key_congruence_examples() {
        let p = p0();
        assert!(!key_congruence(&p, 1, 0, 2, 0, 3).unwrap());
        assert!(!key_congruence(&p, 1, 0, 1, 1, 3).unwrap());
        assert!(key_congruence(&p, 2, 0, 2, 0, 3).unwrap());
        assert_eq!(key_congruence(&p, 1, 0, 2, 0, 2).unwrap_err().code(), "HYPOTHESIS_VIOLATION");
        assert_eq!(key_congruence(&p, 3, 0, 2, 0, 3).unwrap_err().code(), "HYPOTHESIS_VIOLATION");
        assert_eq!(key_congruence(&p1(), 1, 0, 2, 0, 3).unwrap_err().code(), "HYPOTHESIS_VIOLATION");
    }

    #[test]
    fn certificate_rules_on_p0() {
        let p = p0();
        let certs = sigma_disjoint(&p, &pair(&p, "a^-2", "a*b"), &pair(&p, "a*b^2", "b"), 3).unwrap();
        assert_eq!(certs.len(), 9);
        let rule = |u: &str, v: &str| certs.iter().find(|c| c.u == u && c.v == v).unwrap().rule;
        assert_eq!(rule("a", "b"), Rule::RootLabel);
        assert_eq!(rule("a^2*b", "a*b^2"), Rule::KeyCongruenceExt);
        assert!(certs.iter().all(|c| c.asserted_extension == (c.rule == Rule::KeyCongruenceExt)));
        assert_eq!(rule("a*b", "b"), Rule::SupportCount);
        assert_eq!(rule("a*b", "a*b^2"), Rule::KeyCongruence);
    }

    #[test]
    fn verdict_p0_and_p1() {
        let p = p0();
        match beauville_verdict(&p, 3, None).unwrap() {
            BeauvilleVerdict::CertifiedBeauville { certificates, .. } => assert_eq!(certificates.len(), 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(beauville_verdict(&p, 1, None).unwrap(), BeauvilleVerdict::Inconclusive { .. }));
        for n in 1..=3 {
            assert!(matches!(beauville_verdict(&p1(), n, None).unwrap(), BeauvilleVerdict::NotBeauville { .. }));
        }
    }

    #[test]
    fn center_witness_examples() {
        let c = center_witness(&p1(), 2).unwrap();
        assert!(c.commutes_with_a && c.commutes_with_b);
        assert_eq!(c.order, BigUint::from(9u32));
        assert_eq!(c.word, w(&p1(), "(a*b)^3"));
        assert_eq!(center_witness(&p0(), 2).unwrap_err().code(), "HYPOTHESIS_VIOLATION");
    }

    #[test]
    fn obstruction_example() {
        let p = p1();
        let o = non_beauville_obstruction(&p, 2, &pair(&p, "a", "b"), &pair(&p, "a*b", "b^-1*a")).unwrap();
        assert!(o.equal_subgroups && o.central);
        assert_eq!(o.subgroup_order, BigUint::from(9u32));
        let err = non_beauville_obstruction(&p, 2, &pair(&p, "a", "a^2"), &pair(&p, "a*b", "b")).unwrap_err();
        assert_eq!(err.code(), "HYPOTHESIS_VIOLATION");
    }
}
