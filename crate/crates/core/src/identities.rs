//! A catalog of exact section identities. Each entry builds one or more
//! instances over a small parameter grid; an instance either compares the
//! first-level section tuple of a word against a pattern, compares two words,
//! or runs a direct computation. Tuple and word comparisons are checked both
//! symbolically (word problem) and on portraits.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, mul_mod, reduce_big, reduce_i128, reduce_i64};
use crate::descent::theta_config;
use crate::error::{Error, Result};
use crate::expr::WordExpr;
use crate::lattice::in_span;
use crate::params::Params;
use crate::quotients::{enumerate_small_quotient, DEFAULT_SIZE_CAP};
use crate::tree::{Portrait, Vertex};
use crate::vectors::{classify_vector, VectorReport};
use crate::word::{Triviality, Word};

/// User-supplied value for an entry parameter: an integer or a word in the
/// expression syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Binding {
    Int(i64),
    Word(String),
}

pub type Bindings = BTreeMap<String, Binding>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail { diff: Vec<String> },
    Skip { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub id: String,
    pub instance: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub parameters: &'static [&'static str],
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub params: Params,
    pub depth: usize,
    pub results: Vec<IdentityResult>,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub total: usize,
}

enum Pattern {
    Exact(Word),
    APower,
    Wild,
}

enum Check {
    Tuple { lhs: Word, expected: Vec<Pattern> },
    Equal { lhs: Word, rhs: Word },
    Direct(std::result::Result<(), Vec<String>>),
}

struct Instance {
    label: String,
    check: std::result::Result<Check, String>,
}

impl Instance {
    fn new(label: impl Into<String>, check: Check) -> Self {
        Instance { label: label.into(), check: Ok(check) }
    }

    fn skip(label: impl Into<String>, reason: impl Into<String>) -> Self {
        Instance { label: label.into(), check: Err(reason.into()) }
    }
}

struct Ctx<'a> {
    params: &'a Params,
    depth: usize,
    bindings: &'a Bindings,
    report: VectorReport,
}

impl Ctx<'_> {
    fn int_grid(&self, name: &str, default: Vec<i64>) -> Vec<i64> {
        match self.bindings.get(name) {
            Some(Binding::Int(v)) => vec![*v],
            _ => default,
        }
    }

    fn word_grid(&self, name: &str, default: &[&str], shift: usize) -> Vec<(String, Result<Word>)> {
        let texts: Vec<String> = match self.bindings.get(name) {
            Some(Binding::Word(s)) => vec![s.clone()],
            Some(Binding::Int(v)) => vec![v.to_string()],
            None => default.iter().map(|s| s.to_string()).collect(),
        };
        texts
            .into_iter()
            .map(|t| {
                let w = WordExpr::parse(&t).and_then(|e| e.normalize(self.params, shift));
                (t, w)
            })
            .collect()
    }

    fn d(&self) -> u64 {
        self.params.d()
    }

    fn m2(&self) -> u64 {
        self.params.degree(1)
    }

    fn e(&self, j: i64) -> i64 {
        let d = self.d() as i64;
        self.params.e_at(j.rem_euclid(d) as u64)
    }

    fn inv_m2(&self, x: i128) -> Option<i64> {
        mod_inverse(x, self.m2()).map(|v| v as i64)
    }
}

/// Word constructors in the group shifted by `shift`.
struct Gen<'a> {
    params: &'a Params,
    shift: usize,
}

impl<'a> Gen<'a> {
    fn new(params: &'a Params, shift: usize) -> Self {
        Gen { params, shift }
    }

    fn one(&self) -> Word {
        Word::identity(self.params, self.shift)
    }

    fn a(&self, s: i64) -> Word {
        Word::a_pow(self.params, self.shift, s)
    }

    fn a_big(&self, s: &BigInt) -> Word {
        let m = self.params.degree(self.shift);
        Word::a_pow(self.params, self.shift, reduce_big(s, m) as i64)
    }

    fn b(&self, beta: impl Into<BigInt>) -> Word {
        Word::b_pow(self.params, self.shift, beta)
    }

    /// `(b^β)^{a^t}`
    fn bc(&self, beta: impl Into<BigInt>, t: i64) -> Word {
        Word::b_conj(self.params, self.shift, beta, t)
    }
}

fn idx(pos: i64, d: u64) -> usize {
    (pos - 1).rem_euclid(d as i64) as usize
}

/// Pins the given positions; every other component must be trivial.
fn exact_tuple(d: u64, one: &Word, pins: Vec<(i64, Word)>) -> std::result::Result<Vec<Pattern>, String> {
    pinned_tuple(d, pins, || Pattern::Exact(one.clone()))
}

/// Pins the given positions; every other component is unspecified.
fn wild_tuple(d: u64, pins: Vec<(i64, Word)>) -> std::result::Result<Vec<Pattern>, String> {
    pinned_tuple(d, pins, || Pattern::Wild)
}

fn pinned_tuple(
    d: u64,
    pins: Vec<(i64, Word)>,
    fill: impl Fn() -> Pattern,
) -> std::result::Result<Vec<Pattern>, String> {
    let mut out: Vec<Option<Pattern>> = (0..d).map(|_| None).collect();
    for (pos, w) in pins {
        let i = idx(pos, d);
        if out[i].is_some() {
            return Err(format!("two pinned components collide at position {}", i + 1));
        }
        out[i] = Some(Pattern::Exact(w));
    }
    Ok(out.into_iter().map(|p| p.unwrap_or_else(&fill)).collect())
}

fn tuple_check(lhs: Word, expected: std::result::Result<Vec<Pattern>, String>) -> std::result::Result<Check, String> {
    expected.map(|expected| Check::Tuple { lhs, expected })
}

type Runner = fn(&Ctx) -> Vec<Instance>;

struct Entry {
    info: EntryInfo,
    run: Runner,
}

fn catalog() -> Vec<Entry> {
    vec![
        Entry {
            info: EntryInfo {
                id: "FIRST_COMMUTATOR",
                summary: "sections of [a^{p^{m1-1}}, b]: b1^-1 a1^{e_q} at q, a1^{-e_{D-q}} b1 at D, a1-powers elsewhere",
                parameters: &[],
            },
            run: first_commutator,
        },
        Entry {
            info: EntryInfo {
                id: "GPRIME_SHIFT",
                summary: "sections of [b, b^{a^i}]: [a1^{e_i}, b1] at i, [b1, a1^{e_{D-i}}] at D",
                parameters: &["i"],
            },
            run: gprime_shift,
        },
        Entry {
            info: EntryInfo {
                id: "GPRIME_TELESCOPE",
                summary: "telescoping product of conjugated commutators isolates [a1^{e_i}, b1] at position i",
                parameters: &["i"],
            },
            run: gprime_telescope,
        },
        Entry {
            info: EntryInfo {
                id: "GAMMA3_SEED",
                summary: "g_k has a1^{e_k^2 - e_{k-i}e_{k+i}} at position 1 and trivial section at D-i+1",
                parameters: &["i", "k"],
            },
            run: gamma3_seed,
        },
        Entry {
            info: EntryInfo {
                id: "GAMMA3_COMMUTATORS",
                summary: "triple commutators with sections ([a1,b1,a1],1,...) and ([a1,b1,b1 a1^c],1,...)",
                parameters: &["i", "k"],
            },
            run: gamma3_commutators,
        },
        Entry {
            info: EntryInfo {
                id: "SSF_GAMMA3",
                summary: "sections of [b1, a1, a1] in the shifted group",
                parameters: &[],
            },
            run: ssf_gamma3,
        },
        Entry {
            info: EntryInfo {
                id: "SYM_CASE1_P3",
                summary: "p = 3, Y = {q, 2q}: two triple commutators supported at the last position",
                parameters: &[],
            },
            run: sym_case1_p3,
        },
        Entry {
            info: EntryInfo {
                id: "SYM_CASE1_GEN",
                summary: "Y = all multiples of p^t: triple commutators supported at position p^t",
                parameters: &[],
            },
            run: sym_case1_gen,
        },
        Entry {
            info: EntryInfo {
                id: "SYM_CASE2_GK",
                summary: "Y a proper symmetric subset: g_{2n}, k_{2n+1}, their alternating product, closing commutator",
                parameters: &["h", "l"],
            },
            run: sym_case2_gk,
        },
        Entry {
            info: EntryInfo {
                id: "THETA_DEF",
                summary: "last section of (b^d)^{(a^n z)^-1} equals z_n a1^n z_n^-1 = a1^n [a1^n, z_n^-1]",
                parameters: &["z", "n"],
            },
            run: theta_def,
        },
        Entry {
            info: EntryInfo {
                id: "B_POWER_RIGHTMOST",
                summary: "level n-1 sections of b^{p^{m_n}} are trivial except the rightmost b_{n-1}^{p^{m_n}}",
                parameters: &["n"],
            },
            run: b_power_rightmost,
        },
        Entry {
            info: EntryInfo {
                id: "AB_POWER",
                summary: "sections of (ab^{ip^s})^{p^{m1}} and of its p^{m_n-s} power (zero-sum vectors)",
                parameters: &["i", "s", "n"],
            },
            run: ab_power,
        },
        Entry {
            info: EntryInfo {
                id: "KEY_W",
                summary: "sections of w_{i,s} = (ab^{ip^s})^{p^{m_n+m1-s-1}} (zero-sum vectors)",
                parameters: &["i", "s", "n"],
            },
            run: key_w,
        },
        Entry {
            info: EntryInfo {
                id: "CENTER_POWER",
                summary: "sections of (a^i b^j c)^{p^{m1}} are a1^{js} b1^j modulo G1' (non-zero-sum vectors)",
                parameters: &["i", "j", "c"],
            },
            run: center_power,
        },
        Entry {
            info: EntryInfo {
                id: "CENTRALITY",
                summary: "(ab)^{p^{t_{n-1}}} is central of order p^{m_n} at depth n and generates the same group as (a^i b^j c)^{p^{t_{n-1}}}",
                parameters: &["n"],
            },
            run: centrality,
        },
        Entry {
            info: EntryInfo {
                id: "STAB2_GGS",
                summary: "e = (1,-1,0,...): second-level stabiliser via the circulant kernel, checked at depth 2",
                parameters: &[],
            },
            run: stab2_ggs,
        },
        Entry {
            info: EntryInfo {
                id: "LATTICE_GAMMA3",
                summary: "b1-exponent vector of [a^{p^{m1-1}}, b] is outside the span of the [a,b,a]^{a^k} vectors",
                parameters: &[],
            },
            run: lattice_gamma3,
        },
    ]
}

pub fn list_catalog() -> Vec<EntryInfo> {
    catalog().into_iter().map(|e| e.info).collect()
}

pub fn run_identity(id: &str, params: &Params, bindings: &Bindings, depth: usize) -> Result<Vec<IdentityResult>> {
    let entry = catalog().into_iter().find(|e| e.info.id == id).ok_or_else(|| Error::UnknownId(id.to_string()))?;
    let ctx = Ctx { params, depth, bindings, report: classify_vector(params) };
    Ok((entry.run)(&ctx)
        .into_iter()
        .map(|inst| IdentityResult {
            id: id.to_string(),
            instance: inst.label,
            verdict: match inst.check {
                Ok(check) => evaluate_check(params, check, depth),
                Err(reason) => Verdict::Skip { reason },
            },
        })
        .collect())
}

pub fn run_suite(params: &Params, depth: usize) -> SuiteReport {
    let empty = Bindings::new();
    let mut results = Vec::new();
    for info in list_catalog() {
        results.extend(run_identity(info.id, params, &empty, depth).expect("catalog id"));
    }
    let count = |f: fn(&Verdict) -> bool| results.iter().filter(|r| f(&r.verdict)).count();
    let pass = count(|v| matches!(v, Verdict::Pass));
    let fail = count(|v| matches!(v, Verdict::Fail { .. }));
    let skip = count(|v| matches!(v, Verdict::Skip { .. }));
    SuiteReport { params: params.clone(), depth, total: results.len(), results, pass, fail, skip }
}

fn evaluate_check(params: &Params, check: Check, depth: usize) -> Verdict {
    let diff = match check {
        Check::Tuple { lhs, expected } => compare_tuple(params, &lhs, &expected, depth),
        Check::Equal { lhs, rhs } => compare_words(params, &lhs, &rhs, depth),
        Check::Direct(r) => r.err().unwrap_or_default(),
    };
    if diff.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail { diff }
    }
}

fn feasible_depth(params: &Params, shift: usize, depth: usize) -> usize {
    depth.min(params.levels() - shift)
}

fn compare_words(params: &Params, lhs: &Word, rhs: &Word, depth: usize) -> Vec<String> {
    let mut diff = Vec::new();
    if lhs.mul(&rhs.inverse()).is_trivial(params) == Triviality::NonTrivial {
        diff.push(format!("symbolic: {lhs} != {rhs}"));
    }
    let d = feasible_depth(params, lhs.shift(), depth);
    if d >= 1 {
        match (lhs.evaluate(params, d), rhs.evaluate(params, d)) {
            (Ok(f), Ok(g)) if f == g => {}
            (Ok(_), Ok(_)) => diff.push(format!("portrait at depth {d}: {lhs} != {rhs}")),
            (Err(e), _) | (_, Err(e)) => diff.push(e.to_string()),
        }
    }
    diff
}

fn compare_tuple(params: &Params, lhs: &Word, expected: &[Pattern], depth: usize) -> Vec<String> {
    let mut diff = Vec::new();
    if !expected.iter().any(|p| !matches!(p, Pattern::Wild)) {
        return vec!["entry pins no component".into()];
    }
    let comps = match lhs.first_level_sections(params) {
        Ok(c) => c,
        Err(e) => return vec![e.to_string()],
    };
    if comps.len() != expected.len() {
        return vec![format!("tuple length {} != {}", comps.len(), expected.len())];
    }
    let shift = lhs.shift();
    let d = feasible_depth(params, shift, depth);
    let portrait = if d >= 2 { lhs.evaluate(params, d).ok() } else { None };
    for (j, (comp, pat)) in comps.iter().zip(expected).enumerate() {
        let pos = j + 1;
        let sec = portrait.as_ref().map(|f| f.section(&Vertex::new(shift, vec![pos as u64])).expect("child"));
        match pat {
            Pattern::Wild => {}
            Pattern::Exact(w) => {
                if comp.mul(&w.inverse()).is_trivial(params) == Triviality::NonTrivial {
                    diff.push(format!("component {pos}: got {comp}, expected {w}"));
                }
                if let Some(sec) = &sec {
                    if w.evaluate(params, d - 1).ok().as_ref() != Some(sec) {
                        diff.push(format!("component {pos}: portrait differs from {w}"));
                    }
                }
            }
            Pattern::APower => {
                let (ea, _) = comp.exponent_maps();
                let target = Word::a_pow(params, shift + 1, ea as i64);
                if comp.mul(&target.inverse()).is_trivial(params) == Triviality::NonTrivial {
                    diff.push(format!("component {pos}: {comp} is not a power of a"));
                }
                if let Some(sec) = &sec {
                    let a = Portrait::a_power(params, shift + 1, d - 1, sec.root_label()).expect("depth");
                    if &a != sec {
                        diff.push(format!("component {pos}: portrait is not a rooted power"));
                    }
                }
            }
        }
    }
    diff
}

fn first_commutator(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d();
    let q = p.pow(p.m()[0] - 1) as i64;
    let lhs = g0.a(q).comm(&g0.b(1));
    let mut pats: Vec<Pattern> = (0..d).map(|_| Pattern::APower).collect();
    pats[idx(q, d)] = Pattern::Exact(g1.b(-1).mul(&g1.a(ctx.e(q))));
    pats[idx(d as i64, d)] = Pattern::Exact(g1.a(-ctx.e(d as i64 - q)).mul(&g1.b(1)));
    vec![Instance::new(format!("q={q}"), Check::Tuple { lhs, expected: pats })]
}

fn gprime_shift(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    if !ctx.report.in_f {
        return vec![Instance::skip("-", "defining vector not in F")];
    }
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d() as i64;
    let y = &ctx.report.y;
    ctx.int_grid("i", y.iter().map(|&i| i as i64).collect())
        .into_iter()
        .map(|i| {
            let label = format!("i={i}");
            if !y.contains(&(i.rem_euclid(d) as u64)) {
                return Instance::skip(label, "i not in Y");
            }
            let lhs = g0.b(1).comm(&g0.bc(1, i));
            let b1 = g1.b(1);
            let expected = exact_tuple(
                d as u64,
                &g1.one(),
                vec![(i, g1.a(ctx.e(i)).comm(&b1)), (d, b1.comm(&g1.a(ctx.e(d - i))))],
            );
            Instance { label, check: tuple_check(lhs, expected) }
        })
        .collect()
}

fn gprime_telescope(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    if !ctx.report.in_f {
        return vec![Instance::skip("-", "defining vector not in F")];
    }
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d() as i64;
    let m2 = ctx.m2();
    let y: BTreeSet<u64> = ctx.report.y.iter().copied().collect();
    let default: Vec<i64> = y.iter().filter(|&&i| !y.contains(&(d as u64 - i))).map(|&i| i as i64).collect();
    if default.is_empty() && !ctx.bindings.contains_key("i") {
        return vec![Instance::skip("-", "no i in Y with D - i outside Y")];
    }
    ctx.int_grid("i", default)
        .into_iter()
        .map(|i| {
            let label = format!("i={i}");
            let iu = i.rem_euclid(d) as u64;
            if !y.contains(&iu) || y.contains(&(d as u64 - iu)) {
                return Instance::skip(label, "requires i in Y and D - i outside Y");
            }
            let k = ctx.e(i);
            let mu = ctx.inv_m2(k as i128).expect("e_i is a unit") as i128;
            let tail = ctx.e(d - i);
            // leftover [b1^X, a1^Z] sits at position -r*i
            let mut product = g0.b(1).comm(&g0.bc(1, i));
            let mut x = BigInt::one();
            let mut z = reduce_i64(tail, m2);
            let mut r: i64 = 0;
            let mut steps = Vec::new();
            while z != 0 {
                r += 1;
                if (-(r) * i - i).rem_euclid(d) == 0 || r > 8 * p.m()[1] as i64 {
                    return Instance::skip(label, "telescope wraps onto position i");
                }
                let b_exp = BigInt::from(mu) * BigInt::from(z);
                let term = g0.b(b_exp.clone()).comm(&g0.bc(x.clone(), i)).conj(&g0.a(-r * i));
                steps.push(format!("[b^{b_exp}, (b^(a^{i}))^{x}]^(a^{})", -r * i));
                product = product.mul(&term);
                let new_z = reduce_big(&(&x * BigInt::from(tail)), m2);
                x = b_exp;
                z = new_z;
            }
            let expected = exact_tuple(d as u64, &g1.one(), vec![(i, g1.a(k).comm(&g1.b(1)))]);
            Instance { label: format!("{label} terms={}", steps.len() + 1), check: tuple_check(product, expected) }
        })
        .collect()
}

/// `g_k = (b^{a^{D-k+1}})^{e_k} (b^{a^{D-k-i+1}})^{-e_{k-i}}`.
fn g_k(ctx: &Ctx, i: i64, k: i64) -> Word {
    let g0 = Gen::new(ctx.params, 0);
    let d = ctx.d() as i64;
    g0.bc(ctx.e(k), d - k + 1).mul(&g0.bc(-ctx.e(k - i), d - k - i + 1))
}

fn ik_pairs(ctx: &Ctx, need_det: bool) -> Vec<(i64, i64)> {
    let d = ctx.d() as i64;
    let p = ctx.params.p() as i128;
    let is = ctx.int_grid("i", ctx.report.y.iter().map(|&i| i as i64).collect());
    let mut out = Vec::new();
    for i in is {
        let ks = ctx.int_grid("k", ((i + 1)..(d - i)).collect());
        for k in ks {
            if k - i < 1 || k + i > d - 1 {
                continue;
            }
            let det = ctx.e(k) as i128 * ctx.e(k) as i128 - ctx.e(k - i) as i128 * ctx.e(k + i) as i128;
            if !need_det || det.rem_euclid(p) != 0 {
                out.push((i, k));
            }
        }
    }
    out
}

fn gamma3_seed(ctx: &Ctx) -> Vec<Instance> {
    if !ctx.report.in_f {
        return vec![Instance::skip("-", "defining vector not in F")];
    }
    let g1 = Gen::new(ctx.params, 1);
    let d = ctx.d() as i64;
    let pairs = ik_pairs(ctx, false);
    if pairs.is_empty() {
        return vec![Instance::skip("-", "no i in Y with e_{k-i}, e_k, e_{k+i} all defined")];
    }
    pairs
        .into_iter()
        .map(|(i, k)| {
            let det = ctx.e(k) as i128 * ctx.e(k) as i128 - ctx.e(k - i) as i128 * ctx.e(k + i) as i128;
            let det = reduce_i128(det, ctx.m2()) as i64;
            let expected = wild_tuple(d as u64, vec![(1, g1.a(det)), (d - i + 1, g1.one())]);
            Instance { label: format!("i={i} k={k}"), check: tuple_check(g_k(ctx, i, k), expected) }
        })
        .collect()
}

fn gamma3_commutators(ctx: &Ctx) -> Vec<Instance> {
    if !ctx.report.in_f {
        return vec![Instance::skip("-", "defining vector not in F")];
    }
    if ctx.report.constant_mod_p {
        return vec![Instance::skip("-", "defining vector is constant modulo p")];
    }
    let (g0, g1) = (Gen::new(ctx.params, 0), Gen::new(ctx.params, 1));
    let d = ctx.d() as i64;
    let pairs = ik_pairs(ctx, true);
    if pairs.is_empty() {
        return vec![Instance::skip("-", "no (i, k) with e_k^2 - e_{k-i}e_{k+i} a unit")];
    }
    let (a1, b1) = (g1.a(1), g1.b(1));
    let mut out = Vec::new();
    for (i, k) in pairs {
        let det = ctx.e(k) as i128 * ctx.e(k) as i128 - ctx.e(k - i) as i128 * ctx.e(k + i) as i128;
        let label = format!("i={i} k={k}");
        let Some(nu) = ctx.inv_m2(det) else {
            out.push(Instance::skip(label, "determinant not invertible modulo p^m2"));
            continue;
        };
        let mu = ctx.inv_m2(ctx.e(i) as i128).expect("e_i is a unit");
        let g = g_k(ctx, i, k).pow_i64(nu);
        let x = g0.bc(mu, -(i - 1));
        let y = g0.bc(1, 1);
        let lhs = x.comm(&y).comm(&g);
        let expected = exact_tuple(d as u64, &g1.one(), vec![(1, a1.comm(&b1).comm(&a1))]);
        out.push(Instance { label: format!("{label} g"), check: tuple_check(lhs, expected) });

        let c = -(mu as i128) * ctx.e(2 * i) as i128 * ctx.e(d - i) as i128;
        let c = reduce_i128(c, ctx.m2()) as i64;
        let h = g0.bc(1, 1).mul(&g0.bc(-(mu as i128 * ctx.e(d - i) as i128) as i64, d - 2 * i + 1));
        let lhs = x.comm(&y).comm(&h);
        let expected = exact_tuple(d as u64, &g1.one(), vec![(1, a1.comm(&b1).comm(&b1.mul(&g1.a(c))))]);
        out.push(Instance { label: format!("{label} companion"), check: tuple_check(lhs, expected) });
    }
    out
}

fn ssf_gamma3(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    if p.levels() < 3 {
        return vec![Instance::skip("-", "needs an exponent prefix of length at least 3")];
    }
    let (g1, g2) = (Gen::new(p, 1), Gen::new(p, 2));
    let d = ctx.d() as i64;
    let d2 = p.degree(1);
    let lhs = g1.b(1).comm(&g1.a(1)).comm(&g1.a(1));
    let e = |j: i64| if j >= 1 && j < d { p.e_at(j as u64) } else { 0 };
    let mut pins = vec![(1, g2.b(-1).mul(&g2.a(e(1))).mul(&g2.b(-1))), (2, g2.a(e(2) - 2 * e(1)).mul(&g2.b(1)))];
    for j in 3..=(d + 1) {
        pins.push((j, g2.a(e(j - 2) - 2 * e(j - 1) + e(j))));
    }
    pins.push((d2 as i64, g2.b(1)));
    vec![Instance { label: "shift=1".into(), check: tuple_check(lhs, exact_tuple(d2, &g2.one(), pins)) }]
}

/// `Y` consists exactly of the multiples of `p^t` (case 1), or is a proper
/// symmetric subset of them (case 2).
fn multiples_of_q(ctx: &Ctx) -> (i64, Vec<u64>) {
    let q = ctx.params.pow(ctx.report.t);
    let all: Vec<u64> = (1..).map(|k| k * q).take_while(|&x| x < ctx.d()).collect();
    (q as i64, all)
}

fn symmetric_gate(ctx: &Ctx) -> Option<String> {
    if !ctx.report.in_f {
        return Some("defining vector not in F".into());
    }
    if ctx.report.in_e {
        return Some("defining vector lies in E".into());
    }
    if !ctx.report.y_symmetric {
        return Some("Y is not symmetric".into());
    }
    None
}

fn sym_case1_p3(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = symmetric_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    let m1 = p.m()[0];
    let (q, all) = multiples_of_q(ctx);
    if p.p() != 3 || ctx.report.t != m1 - 1 || ctx.report.y != all {
        return vec![Instance::skip("-", "requires p = 3 and Y = {3^{m1-1}, 2*3^{m1-1}}")];
    }
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d() as i64;
    let m2 = ctx.m2();
    let (alpha, beta) = (ctx.e(q), ctx.e(2 * q));
    let ai = ctx.inv_m2(alpha as i128).expect("unit") as i128;
    let bi = ctx.inv_m2(beta as i128).expect("unit") as i128;
    let (a1, b1) = (g1.a(alpha), g1.b(1));
    let b = g0.b(1);

    let x = (-ai * beta as i128) as i64;
    let lhs = g0.bc(1, 2 * q).comm(&b).comm(&b.mul(&g0.bc(x, q)));
    let c = reduce_i128(-ai * beta as i128 * beta as i128, m2) as i64;
    let first = exact_tuple(d as u64, &g1.one(), vec![(d, a1.comm(&b1).comm(&b1.mul(&g1.a(c))))]);

    let y = (bi * alpha as i128) as i64;
    let lhs2 = g0.bc(y, q).comm(&b).comm(&g0.bc(y, 2 * q).mul(&b.inverse()));
    let c2 = reduce_i128(bi * alpha as i128 * alpha as i128, m2) as i64;
    let second = exact_tuple(d as u64, &g1.one(), vec![(d, a1.comm(&b1).comm(&g1.a(c2).mul(&b1.inverse())))]);
    vec![
        Instance { label: "first".into(), check: tuple_check(lhs, first) },
        Instance { label: "second".into(), check: tuple_check(lhs2, second) },
    ]
}

fn sym_case1_gen(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = symmetric_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    let (q, all) = multiples_of_q(ctx);
    if ctx.report.y != all {
        return vec![Instance::skip("-", "Y is not the full set of multiples of p^t")];
    }
    if p.p() == 3 && ctx.report.t == p.m()[0] - 1 {
        return vec![Instance::skip("-", "p = 3 with t = m1 - 1 is handled separately")];
    }
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d() as i64;
    let m2 = ctx.m2();
    let mu = ctx.inv_m2(ctx.e(q) as i128).expect("unit") as i128;
    let b1 = g1.b(1);
    let aq = g1.a(ctx.e(q));

    let x = (-mu * ctx.e(d - q) as i128) as i64;
    let lhs = g0.b(1).comm(&g0.bc(1, q)).comm(&g0.bc(1, q).mul(&g0.bc(x, -q)));
    let c = reduce_i128(-mu * ctx.e(2 * q) as i128 * ctx.e(d - q) as i128, m2) as i64;
    let first = exact_tuple(d as u64, &g1.one(), vec![(q, aq.comm(&b1).comm(&b1.mul(&g1.a(c))))]);

    let g = g0.b(ctx.e(d - 3 * q)).mul(&g0.bc(-ctx.e(d - q), 2 * q));
    let det = ctx.e(q) as i128 * ctx.e(d - 3 * q) as i128 - (ctx.e(d - q) as i128).pow(2);
    let det = reduce_i128(det, m2) as i64;
    let seed = wild_tuple(d as u64, vec![(q, g1.a(det)), (d - q, g1.one())]);

    let lambda = mul_mod(reduce_i64(ctx.e(2 * q), m2), mu as u64, m2);
    let li = ctx.inv_m2(lambda as i128).expect("unit");
    let lhs3 = g0.bc(li, -q).comm(&g0.bc(1, q)).comm(&g);
    let third = exact_tuple(d as u64, &g1.one(), vec![(q, aq.comm(&b1).comm(&g1.a(det)))]);
    vec![
        Instance { label: format!("q={q} companion"), check: tuple_check(lhs, first) },
        Instance { label: format!("q={q} g"), check: tuple_check(g, seed) },
        Instance { label: format!("q={q} commutator"), check: tuple_check(lhs3, third) },
    ]
}

fn big_pow(base: i64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), k as usize)
}

fn sym_case2_gk(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = symmetric_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let (q, all) = multiples_of_q(ctx);
    if ctx.report.y == all {
        return vec![Instance::skip("-", "Y is the full set of multiples of p^t")];
    }
    let d = ctx.d() as i64;
    let y_set: BTreeSet<u64> = ctx.report.y.iter().copied().collect();
    let in_y = |x: i64| y_set.contains(&(x.rem_euclid(d) as u64));
    let count = d / q;
    let mut pairs = Vec::new();
    for h in ctx.int_grid("h", (1..count).collect()) {
        for l in ctx.int_grid("l", (1..count).collect()) {
            if h >= 1 && l >= 1 && !in_y(h * q) && in_y(l * q) && in_y((h - l) * q) {
                pairs.push((h, l));
            }
        }
    }
    if pairs.is_empty() {
        return vec![Instance::skip("-", "no (h, l) with hq outside Y and lq, (h-l)q in Y")];
    }
    let default_limit = if ctx.bindings.is_empty() { 2 } else { usize::MAX };
    pairs.truncate(default_limit);
    let mut out = Vec::new();
    for (h, l) in pairs {
        out.extend(sym_case2_instances(ctx, q, h, l));
    }
    out
}

fn sym_case2_instances(ctx: &Ctx, q: i64, h: i64, l: i64) -> Vec<Instance> {
    let p = ctx.params;
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d() as i64;
    let m2 = ctx.m2();
    let lq = l * q;
    let tag = format!("h={h} l={l}");
    let lambda = ctx.e(lq);
    let qq = ctx.e(d - h * q);
    let z = ctx.e(d - lq);
    let y = ctx.e(d - (h - l) * q);
    let li = ctx.inv_m2(lambda as i128).expect("unit");
    let yi = ctx.inv_m2(y as i128).expect("unit");
    // minimal r with q^r ≡ 0 mod p^{m2}
    let mut r = 1u32;
    while reduce_big(&big_pow(qq, r), m2) != 0 {
        r += 1;
    }
    let positions: Vec<i64> = (-1..=r as i64).map(|k| (d - k * lq).rem_euclid(d)).collect();
    let distinct: BTreeSet<i64> = positions.iter().copied().collect();
    if distinct.len() != positions.len() {
        return vec![Instance::skip(tag, "chain of positions wraps around")];
    }
    let a1b = |e: &BigInt| g1.a_big(e);
    let b1b = |e: &BigInt| g1.b(e.clone());
    let lin = |n: u32| big_pow(li, n) * big_pow(z, n); // λ^{-n} z^n as an integer
    let qy = |a: u32, b: u32| big_pow(qq, a) * big_pow(yi, b);

    let mut out = Vec::new();
    let mut product = g0.one();
    for idx_term in 0..r {
        let n = idx_term / 2;
        let (term, pins) = if idx_term % 2 == 0 {
            let e1 = lin(n);
            let w = g0
                .b(e1.clone())
                .comm(&g0.bc(e1.clone(), lq))
                .comm(&g0.bc(qy(2 * n, 2 * n + 1), h * q))
                .conj(&g0.a(-(2 * n as i64) * lq));
            let x = b1b(&e1).comm(&a1b(&(&e1 * z))).comm(&a1b(&qy(2 * n + 1, 2 * n + 1)));
            let yv = a1b(&(&e1 * lambda)).comm(&b1b(&e1)).comm(&a1b(&qy(2 * n, 2 * n)));
            (w, vec![(d - 2 * n as i64 * lq, x), (d - (2 * n as i64 - 1) * lq, yv)])
        } else {
            let e1 = lin(n);
            let e2 = lin(n + 1);
            let w = g0
                .bc(e1.clone(), lq)
                .comm(&g0.b(e2.clone()))
                .comm(&g0.bc(qy(2 * n + 1, 2 * n + 2), h * q))
                .conj(&g0.a(-(2 * n as i64 + 1) * lq));
            let x = a1b(&(&e1 * z)).comm(&b1b(&e2)).comm(&a1b(&qy(2 * n + 2, 2 * n + 2)));
            let yv = b1b(&e1).comm(&a1b(&(&e1 * z))).comm(&a1b(&qy(2 * n + 1, 2 * n + 1)));
            (w, vec![(d - (2 * n as i64 + 1) * lq, x), (d - 2 * n as i64 * lq, yv)])
        };
        let name = if idx_term % 2 == 0 { format!("g_{idx_term}") } else { format!("k_{idx_term}") };
        product = if idx_term % 2 == 0 { product.mul(&term) } else { product.mul(&term.inverse()) };
        out.push(Instance {
            label: format!("{tag} {name}"),
            check: tuple_check(term, exact_tuple(d as u64, &g1.one(), pins)),
        });
    }
    let target = g1.a(lambda).comm(&g1.b(1)).comm(&g1.a(1));
    out.push(Instance {
        label: format!("{tag} product r={r}"),
        check: tuple_check(product, exact_tuple(d as u64, &g1.one(), vec![(lq, target)])),
    });

    let x = -(li as i128 * z as i128) as i64;
    let lhs = g0.b(1).comm(&g0.bc(1, lq)).comm(&g0.bc(1, lq).mul(&g0.bc(x, -lq)));
    let c = reduce_i128(-(li as i128) * z as i128 * ctx.e(2 * lq) as i128, m2) as i64;
    let closing = g1.a(lambda).comm(&g1.b(1)).comm(&g1.b(1).mul(&g1.a(c)));
    out.push(Instance {
        label: format!("{tag} closing"),
        check: tuple_check(lhs, exact_tuple(d as u64, &g1.one(), vec![(lq, closing)])),
    });
    out
}

const DERIVED_SAMPLES: &[&str] = &[
    "comm(a,b)",
    "comm(b,conj(b,a))",
    "comm(a^2,b^-1)",
    "comm(a,b)^2*comm(b,conj(b,a^2))",
    "comm(conj(b,a),b^2)*comm(a,b^-1)",
];

fn theta_def(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    let n = match ctx.bindings.get("n") {
        Some(Binding::Int(n)) => Some(*n as u64),
        _ => None,
    };
    let cfg = match theta_config(p, n) {
        Ok(c) => c,
        Err(e) => return vec![Instance::skip("-", e.to_string())],
    };
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d();
    let mut out = Vec::new();
    for (text, w) in ctx.word_grid("z", DERIVED_SAMPLES, 0) {
        let label = format!("n={} d={} z={text}", cfg.n, cfg.d);
        let z = match w {
            Ok(z) => z,
            Err(e) => {
                out.push(Instance::skip(label, e.to_string()));
                continue;
            }
        };
        let (ea, eb) = z.exponent_maps();
        if ea != 0 || !eb.is_zero() {
            out.push(Instance::skip(label, "z has non-zero exponent maps"));
            continue;
        }
        let zn = z.first_level_sections(p).expect("stabiliser")[cfg.n as usize - 1].clone();
        let lhs = g0.b(cfg.d).conj(&g0.a(cfg.n as i64).mul(&z).inverse());
        let an = g1.a(cfg.n as i64);
        let conj_form = zn.mul(&an).mul(&zn.inverse());
        let comm_form = an.mul(&an.comm(&zn.inverse()));
        out.push(Instance {
            label: format!("{label} conjugate"),
            check: tuple_check(lhs.clone(), wild_tuple(d, vec![(d as i64, conj_form.clone())])),
        });
        out.push(Instance {
            label: format!("{label} commutator"),
            check: tuple_check(lhs, wild_tuple(d, vec![(d as i64, comm_form.clone())])),
        });
        out.push(Instance::new(format!("{label} forms agree"), Check::Equal { lhs: conj_form, rhs: comm_form }));
    }
    out
}

fn b_power_rightmost(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    let big_n = p.levels() as i64;
    ctx.int_grid("n", (2..=big_n).collect())
        .into_iter()
        .map(|n| {
            let label = format!("n={n}");
            if n < 2 || n > big_n {
                return Instance::skip(label, "n must lie in 2..=N");
            }
            Instance::new(label, Check::Direct(check_b_power(p, n as usize)))
        })
        .collect()
}

fn check_b_power(p: &Params, n: usize) -> std::result::Result<(), Vec<String>> {
    let exp = BigInt::from(p.degree(n - 1));
    let w = Word::b_pow(p, 0, exp.clone());
    let mut diff = Vec::new();
    // symbolic: all sections down to level n-1
    let mut level = vec![w.clone()];
    for _ in 0..(n - 1) {
        let mut next = Vec::new();
        for x in &level {
            next.extend(x.first_level_sections(p).map_err(|e| vec![e.to_string()])?);
        }
        level = next;
    }
    let last = level.len() - 1;
    let target = Word::b_pow(p, n - 1, exp.clone());
    for (i, x) in level.iter().enumerate() {
        let want = if i == last { target.clone() } else { Word::identity(p, n - 1) };
        if x != &want && x.mul(&want.inverse()).is_trivial(p) == Triviality::NonTrivial {
            diff.push(format!("symbolic component {}: {x} != {want}", i + 1));
        }
    }
    // portraits at full depth
    let depth = p.levels();
    let f = w.evaluate(p, depth).map_err(|e| vec![e.to_string()])?;
    let b_sec = Portrait::generator_b(p, n - 1, depth - (n - 1)).expect("depth").power(&exp);
    let mut paths: Vec<Vec<u64>> = vec![vec![]];
    for l in 0..(n - 1) {
        paths = paths
            .into_iter()
            .flat_map(|path| {
                (1..=p.degree(l)).map(move |x| {
                    let mut q = path.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    for (i, path) in paths.iter().enumerate() {
        let sec = f.section(&Vertex::new(0, path.clone())).expect("depth");
        let ok = if i == paths.len() - 1 { sec == b_sec } else { sec.is_identity() };
        if !ok {
            diff.push(format!("portrait section at {path:?} differs"));
        }
    }
    if diff.is_empty() {
        Ok(())
    } else {
        Err(diff)
    }
}

fn zero_sum_gate(ctx: &Ctx) -> Option<String> {
    if !ctx.report.in_f {
        return Some("defining vector not in F".into());
    }
    if !ctx.report.sum_zero {
        return Some("defining vector does not have zero sum".into());
    }
    None
}

/// `S_j = e_1 + ⋯ + e_j`, with `S_D = 0` under the zero-sum hypothesis.
fn partial_sum(ctx: &Ctx, j: i64) -> i64 {
    if j >= ctx.d() as i64 {
        return 0;
    }
    (1..=j).map(|k| ctx.e(k)).sum()
}

fn power_pattern(ctx: &Ctx, b_exp: &BigInt, c: &BigInt) -> Vec<(i64, Word)> {
    let g1 = Gen::new(ctx.params, 1);
    let d = ctx.d() as i64;
    (1..=d)
        .map(|j| {
            let s = BigInt::from(partial_sum(ctx, j));
            (j, g1.b(b_exp.clone()).conj(&g1.a_big(&(c * s))))
        })
        .collect()
}

fn ab_power(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = zero_sum_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    let g0 = Gen::new(p, 0);
    let d = ctx.d();
    let pp = p.p() as i64;
    let m1 = p.m()[0];
    let mut out = Vec::new();
    for i in ctx.int_grid("i", (1..pp).collect()) {
        for s in ctx.int_grid("s", (0..p.m()[1] as i64).collect()) {
            let c = BigInt::from(i) * big_pow(pp, s as u32);
            let base = g0.a(1).mul(&g0.b(c.clone()));
            let lhs = base.pow(&BigInt::from(d));
            let expected = exact_tuple(d, &Gen::new(p, 1).one(), power_pattern(ctx, &c, &c));
            out.push(Instance { label: format!("i={i} s={s}"), check: tuple_check(lhs, expected) });
            for n in ctx.int_grid("n", (3..=p.levels() as i64).collect()) {
                let label = format!("i={i} s={s} n={n}");
                if n < 3 || n as usize > p.levels() || s as u32 > p.m()[n as usize - 1] {
                    out.push(Instance::skip(label, "requires 3 <= n <= N"));
                    continue;
                }
                let mn = p.m()[n as usize - 1];
                let lhs = base.pow(&big_pow(pp, mn + m1 - s as u32));
                let b_exp = BigInt::from(i) * big_pow(pp, mn);
                let expected = exact_tuple(d, &Gen::new(p, 1).one(), power_pattern(ctx, &b_exp, &c));
                out.push(Instance { label, check: tuple_check(lhs, expected) });
            }
        }
    }
    out
}

fn key_w(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = zero_sum_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    let g0 = Gen::new(p, 0);
    let d = ctx.d();
    let pp = p.p() as i64;
    let m1 = p.m()[0];
    let mut out = Vec::new();
    for i in ctx.int_grid("i", (1..pp).collect()) {
        for s in ctx.int_grid("s", (0..p.m()[1] as i64).collect()) {
            for n in ctx.int_grid("n", (3..=p.levels() as i64).collect()) {
                let label = format!("i={i} s={s} n={n}");
                if n < 3 || n as usize > p.levels() || i.rem_euclid(pp) == 0 {
                    out.push(Instance::skip(label, "requires 3 <= n <= N and i prime to p"));
                    continue;
                }
                let mn = p.m()[n as usize - 1];
                let c = BigInt::from(i) * big_pow(pp, s as u32);
                let lhs = g0.a(1).mul(&g0.b(c.clone())).pow(&big_pow(pp, mn + m1 - s as u32 - 1));
                let b_exp = BigInt::from(i) * big_pow(pp, mn - 1);
                let expected = exact_tuple(d, &Gen::new(p, 1).one(), power_pattern(ctx, &b_exp, &c));
                out.push(Instance { label, check: tuple_check(lhs, expected) });
            }
        }
    }
    out
}

fn nonzero_sum_gate(ctx: &Ctx) -> Option<String> {
    if !ctx.report.sum_nonzero_mod_p {
        return Some("defining vector sum is divisible by p".into());
    }
    None
}

fn units_below(limit: u64, p: u64, take: usize) -> Vec<i64> {
    (1..limit).filter(|x| x % p != 0).take(take).map(|x| x as i64).collect()
}

fn center_power(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = nonzero_sum_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    let (g0, g1) = (Gen::new(p, 0), Gen::new(p, 1));
    let d = ctx.d();
    let m2 = ctx.m2();
    let s: i64 = p.e().iter().sum();
    let mut out = Vec::new();
    for i in ctx.int_grid("i", units_below(d, p.p(), 2)) {
        for j in ctx.int_grid("j", units_below(m2, p.p(), 2)) {
            for (text, c) in ctx.word_grid("c", &["1", "comm(a,b)", "comm(b,conj(b,a^-1))"], 0) {
                let label = format!("i={i} j={j} c={text}");
                let c = match c {
                    Ok(c) => c,
                    Err(e) => {
                        out.push(Instance::skip(label, e.to_string()));
                        continue;
                    }
                };
                let (ea, eb) = c.exponent_maps();
                if ea != 0 || !eb.is_zero() {
                    out.push(Instance::skip(label, "c is not in the derived subgroup"));
                    continue;
                }
                if i.rem_euclid(p.p() as i64) == 0 || j.rem_euclid(p.p() as i64) == 0 {
                    out.push(Instance::skip(label, "i and j must be prime to p"));
                    continue;
                }
                let x = g0.a(i).mul(&g0.b(j)).mul(&c).pow(&BigInt::from(d));
                let want_a = reduce_i128(j as i128 * s as i128, m2);
                let model = g1.a(want_a as i64).mul(&g1.b(j));
                out.push(Instance::new(label, Check::Direct(check_modulo_derived(ctx, &x, &model))));
            }
        }
    }
    out
}

/// Every first-level section of `x` agrees with `model` modulo the derived
/// subgroup: equal exponent maps, and equal level sums of portraits.
fn check_modulo_derived(ctx: &Ctx, x: &Word, model: &Word) -> std::result::Result<(), Vec<String>> {
    let p = ctx.params;
    let comps = x.first_level_sections(p).map_err(|e| vec![e.to_string()])?;
    let mut diff = Vec::new();
    let want = model.exponent_maps();
    for (k, c) in comps.iter().enumerate() {
        if c.exponent_maps() != want {
            diff.push(format!("component {}: exponent maps {:?} != {:?}", k + 1, c.exponent_maps(), want));
        }
    }
    let depth = feasible_depth(p, 0, ctx.depth);
    if depth >= 2 {
        let f = x.evaluate(p, depth).map_err(|e| vec![e.to_string()])?;
        let sums = model.evaluate(p, depth - 1).expect("depth").level_label_sums();
        for k in 1..=ctx.d() {
            let sec = f.section(&Vertex::new(0, vec![k])).expect("child");
            if sec.level_label_sums() != sums {
                diff.push(format!("component {k}: portrait level sums differ"));
            }
        }
    }
    if diff.is_empty() {
        Ok(())
    } else {
        Err(diff)
    }
}

fn centrality(ctx: &Ctx) -> Vec<Instance> {
    if let Some(r) = nonzero_sum_gate(ctx) {
        return vec![Instance::skip("-", r)];
    }
    let p = ctx.params;
    ctx.int_grid("n", (2..=p.levels() as i64).collect())
        .into_iter()
        .map(|n| {
            let label = format!("n={n}");
            if n < 2 || n as usize > p.levels() {
                return Instance::skip(label, "n must lie in 2..=N");
            }
            let leaves = p.degrees()[..n as usize].iter().try_fold(1u64, |acc, &d| acc.checked_mul(d));
            if leaves.is_none_or(|l| l > CENTRALITY_LEAF_CAP) {
                return Instance::skip(label, "portraits at depth n too large");
            }
            Instance::new(label, Check::Direct(check_centrality(p, n as usize)))
        })
        .collect()
}

const CENTRALITY_LEAF_CAP: u64 = 100_000;

fn check_centrality(p: &Params, n: usize) -> std::result::Result<(), Vec<String>> {
    let g0 = Gen::new(p, 0);
    let t: u32 = p.m()[..n - 1].iter().sum();
    let e = BigInt::from(p.p()).pow(t);
    let z = g0.a(1).mul(&g0.b(1)).pow(&e);
    let f = z.evaluate(p, n).map_err(|e| vec![e.to_string()])?;
    let a = Portrait::generator_a(p, 0, n).expect("depth");
    let b = Portrait::generator_b(p, 0, n).expect("depth");
    let mut diff = Vec::new();
    if f.compose(&a).unwrap() != a.compose(&f).unwrap() || f.compose(&b).unwrap() != b.compose(&f).unwrap() {
        diff.push("(ab)^{p^t} is not central".to_string());
    }
    let order = f.order(p.p());
    if order != num_bigint::BigUint::from(p.degree(n - 1)) {
        diff.push(format!("order {order} != p^m_n = {}", p.degree(n - 1)));
    }
    let cyclic: HashMap<Portrait, ()> = {
        let mut m = HashMap::new();
        let mut x = f.one();
        loop {
            m.insert(x.clone(), ());
            x = x.compose(&f).unwrap();
            if x.is_identity() {
                break;
            }
        }
        m
    };
    let c_words = ["1", "comm(a,b)", "comm(b,conj(b,a))"];
    for i in units_below(p.d(), p.p(), 2) {
        for j in units_below(p.degree(1), p.p(), 2) {
            for cw in c_words {
                let c = WordExpr::parse(cw).unwrap().normalize(p, 0).unwrap();
                let x = g0.a(i).mul(&g0.b(j)).mul(&c).pow(&e).evaluate(p, n).expect("depth");
                // same cyclic group: x is in <f> and has the same order
                if !cyclic.contains_key(&x) || x.order(p.p()) != order {
                    diff.push(format!("<(a^{i} b^{j} {cw})^(p^{t})> differs from <(ab)^(p^{t})>"));
                }
            }
        }
    }
    if diff.is_empty() {
        Ok(())
    } else {
        Err(diff)
    }
}

const STAB2_EXHAUSTIVE_CAP: u64 = 200_000;

fn stab2_ggs(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    let e = p.e();
    if !(e[0] == 1 && e[1] == -1 && e[2..].iter().all(|&x| x == 0)) {
        return vec![Instance::skip("-", "requires e = (1,-1,0,...,0)")];
    }
    let g0 = Gen::new(p, 0);
    let d = ctx.d();
    let m2 = ctx.m2();
    let product = (0..d as i64).fold(g0.one(), |acc, k| acc.mul(&g0.bc(1, k)));
    let mut out = Vec::new();

    let quotient = product.mul(&g0.b(-(d as i64)));
    out.push(match enumerate_small_quotient(p, 2, DEFAULT_SIZE_CAP) {
        Ok(table) => {
            let derived = table.oracle_derived_subgroup();
            let f = quotient.evaluate(p, 2).expect("depth 2");
            Instance::new(
                "product times b^-D in derived subgroup",
                Check::Direct(if derived.contains(&f) {
                    Ok(())
                } else {
                    Err(vec!["not in the derived subgroup".into()])
                }),
            )
        }
        Err(e) => Instance::skip("product times b^-D in derived subgroup", e.to_string()),
    });

    let f = product.evaluate(p, 2).expect("depth 2");
    out.push(Instance::new(
        "product in st(2)",
        Check::Direct(if f.is_identity() { Ok(()) } else { Err(vec!["product moves a level-2 vertex".into()]) }),
    ));

    let total = (m2 as u128).checked_pow(d as u32);
    match total {
        Some(t) if t <= STAB2_EXHAUSTIVE_CAP as u128 => {
            out.push(Instance::new(
                format!("circulant kernel, {t} exponent vectors"),
                Check::Direct(circulant_scan(p)),
            ));
        }
        _ => out.push(Instance::skip("circulant kernel", "exponent space too large for exhaustive scan")),
    }
    out
}

fn circulant_scan(p: &Params) -> std::result::Result<(), Vec<String>> {
    let d = p.d() as usize;
    let m2 = p.degree(1);
    let conj: Vec<Vec<Portrait>> = (0..d)
        .map(|k| {
            let base = Word::b_conj(p, 0, 1, k as i64).evaluate(p, 2).expect("depth 2");
            let mut pows = vec![base.one()];
            for _ in 1..m2 {
                let next = pows.last().unwrap().compose(&base).unwrap();
                pows.push(next);
            }
            pows
        })
        .collect();
    let mut r = vec![0u64; d];
    let mut diff = Vec::new();
    loop {
        let g = (0..d).fold(conj[0][0].one(), |acc, k| acc.compose(&conj[k][r[k] as usize]).unwrap());
        let in_st2 = g.is_identity();
        let constant = r.iter().all(|&x| x == r[0]);
        if in_st2 != constant {
            diff.push(format!("exponents {r:?}: in st(2) = {in_st2}, constant = {constant}"));
            if diff.len() > 5 {
                break;
            }
        }
        // odometer
        let mut k = 0;
        while k < d {
            r[k] += 1;
            if r[k] < m2 {
                break;
            }
            r[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    if diff.is_empty() {
        Ok(())
    } else {
        Err(diff)
    }
}

fn b_exponent_vector(params: &Params, w: &Word) -> Vec<BigInt> {
    w.first_level_sections(params).expect("stabiliser").iter().map(|c| c.exponent_maps().1).collect()
}

fn lattice_gamma3(ctx: &Ctx) -> Vec<Instance> {
    let p = ctx.params;
    let g0 = Gen::new(p, 0);
    let d = ctx.d() as usize;
    let q = p.pow(p.m()[0] - 1) as i64;
    let (a, b) = (g0.a(1), g0.b(1));
    let aba = a.comm(&b).comm(&a);
    let rows: Vec<Vec<BigInt>> = (0..d as i64).map(|k| b_exponent_vector(p, &aba.conj(&g0.a(k)))).collect();
    let mut diff = Vec::new();
    let circulant: BTreeSet<Vec<BigInt>> = (0..d)
        .map(|s| {
            let mut v = vec![BigInt::zero(); d];
            v[s] = BigInt::from(-1);
            v[(s + 1) % d] += BigInt::from(2);
            v[(s + 2) % d] += BigInt::from(-1);
            v
        })
        .collect();
    let got: BTreeSet<Vec<BigInt>> = rows.iter().cloned().collect();
    if got != circulant {
        diff.push("b1-exponent vectors of [a,b,a]^{a^k} are not the circulant rows".to_string());
    }
    let v = b_exponent_vector(p, &g0.a(q).comm(&b));
    let mut expected_v = vec![BigInt::zero(); d];
    expected_v[idx(q, d as u64)] = BigInt::from(-1);
    expected_v[d - 1] = BigInt::from(1);
    if v != expected_v {
        diff.push(format!("b1-exponent vector of [a^q, b] is {v:?}"));
    }
    if in_span(&rows, &v) {
        diff.push("vector lies in the span".to_string());
    }
    vec![Instance::new(format!("D={d} q={q}"), Check::Direct(if diff.is_empty() { Ok(()) } else { Err(diff) }))]
}
