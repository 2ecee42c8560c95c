//! The Θ map and the two descent procedures used for maximal subgroups:
//! locating a power of `b` at some vertex, and recovering `a` from
//! `⟨b^δ, a^n z⟩`. Both return certificates that can be replayed on portraits.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, mul_mod, pow_u64, reduce_big, reduce_i128, valuation};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::tree::Vertex;
use crate::vectors::{support_mod_p, torsion_condition};
use crate::word::{Syllable, Triviality, Word};

/// `n ∈ Y` and `d` with `d·e_n ≡ n mod p^{m_2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaConfig {
    pub n: u64,
    pub d: u64,
}

pub fn theta_config(params: &Params, n: Option<u64>) -> Result<ThetaConfig> {
    theta_config_at(params, 0, n)
}

/// Same as [`theta_config`] for the group shifted by `shift`, where `d` is
/// taken modulo `p^{m_{shift+2}}`.
pub fn theta_config_at(params: &Params, shift: usize, n: Option<u64>) -> Result<ThetaConfig> {
    let y = support_mod_p(params);
    if y.is_empty() {
        return Err(Error::NotInF);
    }
    let n = match n {
        Some(n) if y.contains(&n) => n,
        Some(n) => return Err(Error::BadN(n as usize)),
        None => y[0],
    };
    let m = params.degree(shift + 1);
    let inv = mod_inverse(params.e_at(n) as i128, m).expect("e_n is a unit");
    let d = mul_mod(n % m, inv, m);
    Ok(ThetaConfig { n, d })
}

/// `Θ(z) = [a_1^n, z_n^{-1}]` for `z` with vanishing exponent maps.
pub fn theta(params: &Params, z: &Word, cfg: &ThetaConfig) -> Result<Word> {
    let zn = theta_component(params, z, cfg)?;
    let an = Word::a_pow(params, z.shift() + 1, cfg.n as i64);
    Ok(an.comm(&zn.inverse()))
}

/// The component `z_n` of `ψ_1(z)`, after checking the exponent maps.
pub fn theta_component(params: &Params, z: &Word, cfg: &ThetaConfig) -> Result<Word> {
    check_derived(z)?;
    let comps = z.first_level_sections(params)?;
    Ok(comps[cfg.n as usize - 1].clone())
}

fn check_derived(z: &Word) -> Result<()> {
    let (ea, eb) = z.exponent_maps();
    if ea != 0 || !eb.is_zero() {
        return Err(Error::NotInDerived(format!("({ea}, {eb})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ZType {
    One,
    Two,
    Three,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeReport {
    pub types: BTreeSet<ZType>,
    pub zn: Word,
}

/// Types of `z ∈ G'` relative to its `n`-th section. The identity has
/// `|z_n| = |z|/2 = 0` and is reported as both TWO and THREE.
pub fn classify_type(params: &Params, z: &Word, cfg: &ThetaConfig) -> Result<TypeReport> {
    let zn = theta_component(params, z, cfg)?;
    let mut types = BTreeSet::new();
    if 2 * zn.blength() != z.blength() {
        types.insert(ZType::One);
    } else {
        if zn.head() == 0 {
            types.insert(ZType::Two);
        }
        if zn.last_a() == 0 {
            types.insert(ZType::Three);
        }
        if types.is_empty() {
            return Err(Error::HypothesisViolation(format!("z_n = {zn} has half length but starts and ends with a")));
        }
    }
    Ok(TypeReport { types, zn })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescentCase {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2a")]
    TwoA,
    #[serde(rename = "2b")]
    TwoB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TraceStep {
    /// Pass to the section at position `j`; `candidates` lists every position
    /// whose b-exponent was a unit mod p (the smallest is taken).
    Section {
        j: u64,
        candidates: Vec<u64>,
    },
    Power {
        exponent: u64,
    },
    Case {
        case: DescentCase,
        blength: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocateCertificate {
    pub vertex: Vertex,
    #[serde(with = "crate::bigserde::big_int")]
    pub delta: BigInt,
    /// The endpoint is `(b_i^δ)^{a_i^k}`; zero unless the prefix ran out
    /// right at a conjugated power of `b`.
    pub conjugator_exponent: u64,
    pub trace: Vec<TraceStep>,
}

/// Section descent: from `x` with `ε_b(x) ≢ 0 mod p`, pass through powers
/// and sections until a single power of `b` remains. Among the admissible
/// sections the smallest position is tried first; if that branch runs out of
/// prefix the next one is tried, so the returned path is the
/// lexicographically smallest successful one.
pub fn locate_b(params: &Params, x: &Word, max_level: usize) -> Result<LocateCertificate> {
    if !torsion_condition(params) {
        return Err(Error::NoTorsionCondition);
    }
    let p = params.p();
    let (_, eb) = x.exponent_maps();
    if reduce_big(&eb, p) == 0 {
        return Err(Error::BadInput(format!("epsilon_b = {eb} is divisible by p")));
    }
    let cert = LocateCertificate {
        vertex: Vertex::root(x.shift()),
        delta: BigInt::zero(),
        conjugator_exponent: 0,
        trace: Vec::new(),
    };
    descend(params, x.clone(), x.shift(), max_level, cert, None)
}

fn descend(
    params: &Params,
    mut cur: Word,
    start: usize,
    max_level: usize,
    mut cert: LocateCertificate,
    // (blength, valuation) of the previous Case 2(b) round
    mut plateau: Option<(usize, u32)>,
) -> Result<LocateCertificate> {
    let p = params.p();
    let level = cur.shift() - start;
    let can_descend = level < max_level && cur.shift() + 1 < params.levels();
    let (ea, _) = cur.exponent_maps();
    if ea == 0 {
        if cur.blength() == 1 {
            let (beta, t) = cur.b_conjugates()?.remove(0);
            if t == 0 || !can_descend {
                cert.delta = beta;
                cert.conjugator_exponent = t;
                return Ok(cert);
            }
            // (b^β)^{a^t} has b_1^β at position t
            let next = cur.first_level_sections(params)?.swap_remove(t as usize - 1);
            cert.trace.push(TraceStep::Section { j: t, candidates: vec![t] });
            cert.vertex.path.push(t);
            return descend(params, next, start, max_level, cert, plateau);
        }
        cert.trace.push(TraceStep::Case { case: DescentCase::One, blength: cur.blength() });
    } else {
        let m = cur.modulus();
        let v = valuation(ea as i128, p).expect("nonzero");
        let (case, exponent) = if v == 0 { (DescentCase::TwoA, m) } else { (DescentCase::TwoB, m / pow_u64(p, v)) };
        cert.trace.push(TraceStep::Case { case, blength: cur.blength() });
        if case == DescentCase::TwoB {
            if let Some((len, prev)) = plateau {
                if len == cur.blength() && v <= prev {
                    return Err(Error::HypothesisViolation(format!(
                        "plateau without growing divisibility (valuation {prev} then {v})"
                    )));
                }
            }
            plateau = Some((cur.blength(), v));
        }
        cur = cur.pow(&BigInt::from(exponent));
        cert.trace.push(TraceStep::Power { exponent });
    }
    if !can_descend {
        let partial = serde_json::to_string(&cert).expect("serialisable");
        return Err(Error::PrefixExhausted { partial });
    }
    let comps = cur.first_level_sections(params)?;
    let candidates: Vec<u64> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| reduce_big(&c.exponent_maps().1, p) != 0)
        .map(|(j, _)| j as u64 + 1)
        .collect();
    if candidates.is_empty() {
        return Err(Error::HypothesisViolation("no section with b-exponent prime to p".into()));
    }
    let mut first_err = None;
    for &j in &candidates {
        let mut branch = cert.clone();
        branch.trace.push(TraceStep::Section { j, candidates: candidates.clone() });
        branch.vertex.path.push(j);
        match descend(params, comps[j as usize - 1].clone(), start, max_level, branch, plateau) {
            Ok(c) => return Ok(c),
            Err(e @ Error::PrefixExhausted { .. }) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.expect("some candidate was tried"))
}

/// Replays a certificate symbolically and on portraits at the full available
/// depth, checking every intermediate and the endpoint.
pub fn verify_locate(params: &Params, x: &Word, cert: &LocateCertificate) -> Result<bool> {
    let depth = params.levels() - x.shift();
    let mut w = x.clone();
    let mut f = x.evaluate(params, depth)?;
    for step in &cert.trace {
        match step {
            TraceStep::Case { .. } => continue,
            TraceStep::Power { exponent } => {
                w = w.pow(&BigInt::from(*exponent));
                f = f.pow_u64(*exponent);
            }
            TraceStep::Section { j, .. } => {
                let child = Vertex::new(f.shift(), vec![*j]);
                if f.apply(&child)? != child {
                    return Ok(false);
                }
                f = f.section(&child)?;
                w = w.first_level_sections(params)?.swap_remove(*j as usize - 1);
            }
        }
        if w.evaluate(params, f.depth())? != f {
            return Ok(false);
        }
    }
    let end = Word::b_conj(params, w.shift(), cert.delta.clone(), cert.conjugator_exponent as i64);
    Ok(reduce_big(&cert.delta, params.p()) != 0
        && end.evaluate(params, f.depth())? == f
        && w.mul(&end.inverse()).is_trivial(params) != Triviality::NonTrivial)
}

/// Generator of `K = ⟨b^δ, a^n z⟩`: `X = b^δ`, `Y = a^n z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KGen {
    X,
    Y,
}

/// A word in the two generators of `K`, so witnesses visibly lie in `K`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KWord(#[serde(with = "crate::bigserde::tagged_ints")] pub Vec<(KGen, BigInt)>);

impl KWord {
    pub fn gen(g: KGen) -> Self {
        KWord(vec![(g, BigInt::from(1))])
    }

    pub fn mul(&self, other: &KWord) -> KWord {
        let mut out = self.0.clone();
        for (g, e) in &other.0 {
            match out.last_mut() {
                Some((h, f)) if h == g => {
                    *f += e;
                    if f.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push((*g, e.clone())),
            }
        }
        KWord(out)
    }

    pub fn inverse(&self) -> KWord {
        KWord(self.0.iter().rev().map(|(g, e)| (*g, -e)).collect())
    }

    pub fn pow(&self, k: i64) -> KWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(KWord::default(), |acc, _| acc.mul(&base))
    }

    pub fn substitute(&self, x: &Word, y: &Word) -> Word {
        self.0.iter().fold(x.one_like(), |acc, (g, e)| {
            let base = if *g == KGen::X { x } else { y };
            acc.mul(&base.pow(e))
        })
    }
}

impl std::fmt::Display for KWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, e)| {
                let s = if *g == KGen::X { "X" } else { "Y" };
                if e == &BigInt::from(1) {
                    s.to_string()
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RecoverMove {
    /// `(b^d)^{(a^n z)^{-1}}`, whose last section is `a^n Θ(z)`.
    Theta,
    /// `(b^d)^{(a^n z)^{q-1}}` with `q` the order of `a^n`.
    Rebalance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaStep {
    pub level: usize,
    pub types: Vec<ZType>,
    pub z_len: usize,
    pub chosen: RecoverMove,
    pub next_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoverCertificate {
    pub k: usize,
    pub vertex: Vertex,
    pub n: u64,
    #[serde(with = "crate::bigserde::big_int")]
    pub lambda: BigInt,
    /// Maps under `φ_v` to `(a_k^n)^{b_k^λ}`.
    pub witness_a: KWord,
    /// Maps under `φ_v` to `b_k^δ`.
    pub witness_b: KWord,
    pub theta_trace: Vec<ThetaStep>,
    pub verified: bool,
}

/// Iterates Θ (or the rebalancing move, whichever gives the shorter
/// commutator part) down the rightmost path until the projected generator is
/// `(a_k^n)^{b_k^λ}`. Witnesses are checked on portraits at the remaining depth.
pub fn recover_a(params: &Params, delta: i64, z: &Word, max_iter: usize) -> Result<RecoverCertificate> {
    let p = params.p();
    if delta.rem_euclid(p as i64) == 0 {
        return Err(Error::BadInput(format!("delta = {delta} is divisible by p")));
    }
    check_derived(z)?;
    let shift = z.shift();
    let cfg = theta_config_at(params, shift, None)?;
    let n = cfg.n;
    let x_word = Word::b_pow(params, shift, delta);
    let y_word = Word::a_pow(params, shift, n as i64).mul(z);

    let mut cert = RecoverCertificate {
        k: 0,
        vertex: Vertex::root(shift),
        n,
        lambda: BigInt::zero(),
        witness_a: KWord::gen(KGen::Y),
        witness_b: KWord::gen(KGen::X),
        theta_trace: Vec::new(),
        verified: false,
    };
    let mut a_cur = y_word.clone();
    for _ in 0..=max_iter {
        let level_shift = shift + cert.k;
        let an = Word::a_pow(params, level_shift, n as i64);
        let zk = an.inverse().mul(&a_cur);
        if let Some(lambda) = conjugated_a(&a_cur, n) {
            cert.lambda = lambda;
            cert.verified = verify_recover(params, &cert, delta, &x_word, &y_word)?;
            return Ok(cert);
        }
        if zk.is_trivial(params) == Triviality::Trivial {
            cert.verified = verify_recover(params, &cert, delta, &x_word, &y_word)?;
            return Ok(cert);
        }
        if cert.theta_trace.len() == max_iter {
            break;
        }
        if level_shift + 1 >= params.levels() {
            let partial = serde_json::to_string(&cert).expect("serialisable");
            return Err(Error::PrefixExhausted { partial });
        }
        let types = classify_type(params, &zk, &ThetaConfig { n, d: 0 })
            .map(|r| r.types.into_iter().collect())
            .unwrap_or_default();
        // ε with δ·ε·e_n ≡ n, so that X^ε = b^d
        let m_next = params.degree(level_shift + 1);
        let eps = {
            let de = reduce_i128(delta as i128 * params.e_at(n) as i128, m_next);
            let inv = mod_inverse(de as i128, m_next).expect("unit");
            mul_mod(inv, n % m_next, m_next) as i64
        };
        let deg = params.degree(level_shift);
        let order_an = deg / pow_u64(p, valuation(n as i128, p).unwrap_or(0));
        let mut moves = vec![(RecoverMove::Theta, -1i64)];
        if order_an > 2 {
            moves.push((RecoverMove::Rebalance, order_an as i64 - 1));
        }
        let b_cur = Word::b_pow(params, level_shift, delta);
        let mut best: Option<(RecoverMove, Word, KWord)> = None;
        for (mv, c) in moves {
            let e = a_cur.pow_i64(-c).mul(&b_cur.pow_i64(eps)).mul(&a_cur.pow_i64(c));
            let next = e.first_level_sections(params)?.pop().expect("nonempty");
            let kw = cert.witness_a.pow(-c).mul(&cert.witness_b.pow(eps)).mul(&cert.witness_a.pow(c));
            let better = best.as_ref().is_none_or(|(_, w, _)| next.blength() < w.blength());
            if better {
                best = Some((mv, next, kw));
            }
        }
        let (mv, next, kw) = best.expect("at least one move");
        cert.theta_trace.push(ThetaStep {
            level: cert.k,
            types,
            z_len: zk.blength(),
            chosen: mv,
            next_len: next.blength(),
        });
        a_cur = next;
        cert.witness_a = kw;
        cert.k += 1;
        cert.vertex.path.push(deg);
    }
    let partial = serde_json::to_string(&cert).expect("serialisable");
    Err(Error::MaxIterExceeded { partial })
}

/// `λ` with `w = (a^n)^{b^λ} = b^{-λ} a^n b^λ`, read off the normal form.
fn conjugated_a(w: &Word, n: u64) -> Option<BigInt> {
    let n = n % w.modulus();
    match w.syllables().as_slice() {
        [Syllable::A(s)] if *s == n => Some(BigInt::zero()),
        [Syllable::B(r), Syllable::A(s), Syllable::B(r2)] if *s == n && (r + r2).is_zero() => Some(-r.clone()),
        _ => None,
    }
}

fn verify_recover(params: &Params, cert: &RecoverCertificate, delta: i64, x: &Word, y: &Word) -> Result<bool> {
    let shift = x.shift();
    let depth = params.levels() - shift;
    let v = &cert.vertex;
    let sub_depth = depth - cert.k;
    let ks = shift + cert.k;
    let bl = Word::b_pow(params, ks, cert.lambda.clone());
    let target_a = Word::a_pow(params, ks, cert.n as i64).conj(&bl).evaluate(params, sub_depth)?;
    let target_b = Word::b_pow(params, ks, delta).evaluate(params, sub_depth)?;
    for (w, target) in [(&cert.witness_a, target_a), (&cert.witness_b, target_b)] {
        let f = w.substitute(x, y).evaluate(params, depth)?;
        if f.apply(v)? != *v || f.section(v)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}
