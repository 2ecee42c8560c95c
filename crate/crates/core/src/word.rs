//! Normal-form words `a^{s_1} b^{β_1} a^{s_2} ⋯ b^{β_ℓ} a^{s_{ℓ+1}}` in the
//! shifted groups, with exponent maps, symbolic first-level sections,
//! evaluation to portraits and the recursive word problem.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod, neg_mod, reduce_big};
use crate::error::{Error, Result};
use crate::params::Params;
use crate::tree::Portrait;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    shift: usize,
    modulus: u64,
    head: u64,
    /// `(β_k, s_{k+1})`: every `β_k` is nonzero and every `s_{k+1}` except the
    /// last is nonzero.
    #[serde(with = "crate::bigserde::int_tagged")]
    tail: Vec<(BigInt, u64)>,
}

/// Answer of the recursive word problem. `Undecided` means the exponent prefix
/// ran out before every branch reached b-length at most one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Triviality {
    Trivial,
    NonTrivial,
    #[serde(rename = "UNDECIDED_PREFIX_TOO_SHORT")]
    Undecided,
}

impl Word {
    pub fn identity(params: &Params, shift: usize) -> Self {
        Word { shift, modulus: params.degree(shift), head: 0, tail: Vec::new() }
    }

    pub fn a_pow(params: &Params, shift: usize, s: i64) -> Self {
        let mut w = Self::identity(params, shift);
        w.push_a_signed(s);
        w
    }

    pub fn a(params: &Params, shift: usize) -> Self {
        Self::a_pow(params, shift, 1)
    }

    pub fn b_pow(params: &Params, shift: usize, beta: impl Into<BigInt>) -> Self {
        let mut w = Self::identity(params, shift);
        w.push_b(beta.into());
        w
    }

    pub fn b(params: &Params, shift: usize) -> Self {
        Self::b_pow(params, shift, 1)
    }

    /// `(b^β)^{a^t} = a^{-t} b^β a^t`.
    pub fn b_conj(params: &Params, shift: usize, beta: impl Into<BigInt>, t: i64) -> Self {
        let mut w = Self::identity(params, shift);
        w.push_a_signed(-t);
        w.push_b(beta.into());
        w.push_a_signed(t);
        w
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn head(&self) -> u64 {
        self.head
    }

    pub fn tail(&self) -> &[(BigInt, u64)] {
        &self.tail
    }

    /// The a-exponent after the last b-syllable (or the head if there is none).
    pub fn last_a(&self) -> u64 {
        self.tail.last().map_or(self.head, |t| t.1)
    }

    pub fn is_empty(&self) -> bool {
        self.head == 0 && self.tail.is_empty()
    }

    pub fn push_a(&mut self, s: u64) {
        let m = self.modulus;
        match self.tail.last_mut() {
            Some(last) => last.1 = add_mod(last.1, s % m, m),
            None => self.head = add_mod(self.head, s % m, m),
        }
    }

    pub fn push_a_signed(&mut self, s: i64) {
        let m = self.modulus;
        self.push_a(crate::arith::reduce_i64(s, m));
    }

    pub fn push_b(&mut self, beta: BigInt) {
        if beta.is_zero() {
            return;
        }
        if let Some(last) = self.tail.last_mut() {
            if last.1 == 0 {
                last.0 += beta;
                if last.0.is_zero() {
                    self.tail.pop();
                }
                return;
            }
        }
        self.tail.push((beta, 0));
    }

    fn check_compatible(&self, other: &Word) {
        assert_eq!(self.shift, other.shift, "words live in different shifted groups");
    }

    pub fn mul(&self, other: &Word) -> Word {
        self.check_compatible(other);
        let mut out = self.clone();
        out.push_a(other.head);
        for (beta, s) in &other.tail {
            out.push_b(beta.clone());
            out.push_a(*s);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        let m = self.modulus;
        let mut out = Word { shift: self.shift, modulus: m, head: 0, tail: Vec::new() };
        out.push_a(neg_mod(self.last_a(), m));
        for k in (0..self.tail.len()).rev() {
            out.push_b(-self.tail[k].0.clone());
            let s = if k == 0 { self.head } else { self.tail[k - 1].1 };
            out.push_a(neg_mod(s, m));
        }
        out
    }

    pub fn pow(&self, k: &BigInt) -> Word {
        if self.tail.is_empty() {
            let m = BigInt::from(self.modulus);
            let s = (BigInt::from(self.head) * k).mod_floor(&m);
            let mut w = Word { shift: self.shift, modulus: self.modulus, head: 0, tail: Vec::new() };
            w.push_a(reduce_big(&s, self.modulus));
            return w;
        }
        if self.head == 0 && self.tail.len() == 1 && self.tail[0].1 == 0 {
            let mut w = Word { shift: self.shift, modulus: self.modulus, head: 0, tail: Vec::new() };
            w.push_b(&self.tail[0].0 * k);
            return w;
        }
        let base = if k.is_negative() { self.inverse() } else { self.clone() };
        let mag = k.magnitude();
        let mut acc = Word { shift: self.shift, modulus: self.modulus, head: 0, tail: Vec::new() };
        let mut sq = base;
        let bits = mag.bits();
        for i in 0..bits {
            if mag.bit(i) {
                acc = acc.mul(&sq);
            }
            if i + 1 < bits {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn pow_i64(&self, k: i64) -> Word {
        self.pow(&BigInt::from(k))
    }

    /// `g^{-1} self g`.
    pub fn conj(&self, g: &Word) -> Word {
        g.inverse().mul(self).mul(g)
    }

    /// `self^{-1} g^{-1} self g`.
    pub fn comm(&self, g: &Word) -> Word {
        self.inverse().mul(&g.inverse()).mul(self).mul(g)
    }

    /// `(ε_a, ε_b)`.
    pub fn exponent_maps(&self) -> (u64, BigInt) {
        let m = self.modulus;
        let ea = self.tail.iter().fold(self.head, |acc, t| add_mod(acc, t.1, m));
        let eb = self.tail.iter().map(|t| &t.0).sum();
        (ea, eb)
    }

    pub fn blength(&self) -> usize {
        self.tail.len()
    }

    /// Writes a stabiliser word as `Π_k (b^{β_k})^{a^{t_k}}` with
    /// `t_k = -(s_1 + ⋯ + s_k)`; requires `ε_a ≡ 0`.
    pub fn b_conjugates(&self) -> Result<Vec<(BigInt, u64)>> {
        let (ea, _) = self.exponent_maps();
        if ea != 0 {
            return Err(Error::NotInStabiliser(ea));
        }
        let m = self.modulus;
        let mut prefix = self.head;
        let mut out = Vec::with_capacity(self.tail.len());
        for (beta, s) in &self.tail {
            out.push((beta.clone(), neg_mod(prefix, m)));
            prefix = add_mod(prefix, *s, m);
        }
        Ok(out)
    }

    /// The first-level section tuple ψ₁(w), components 1..=p^{m_{shift+1}} at
    /// shift+1. Component `j` of `(b^β)^{a^t}` is `b_{+1}^β` when `j ≡ t` and
    /// `a_{+1}^{β e_{j-t}}` when `1 ≤ j - t < p^{m_1}` (mod the degree).
    pub fn first_level_sections(&self, params: &Params) -> Result<Vec<Word>> {
        let shift = self.shift;
        if shift + 1 >= params.levels() {
            return Err(Error::OutOfPrefix { shift: shift + 1, depth: 1, prefix: params.levels() });
        }
        let conj = self.b_conjugates()?;
        let degree = self.modulus;
        let child_mod = params.degree(shift + 1);
        let mut comps = vec![Word::identity(params, shift + 1); degree as usize];
        let d = params.d();
        let e_res: Vec<u64> = (1..d).map(|r| params.e_mod(r, child_mod)).collect();
        for (beta, t) in conj {
            let beta_res = reduce_big(&beta, child_mod);
            // position t (0 means position `degree`) gets b^β
            let pos = |r: u64| ((t + r) % degree) as usize;
            for r in 1..d {
                let e = e_res[r as usize - 1];
                if e != 0 {
                    comps[pos(r)].push_a(mul_mod(beta_res, e, child_mod));
                }
            }
            comps[pos(0)].push_b(beta);
        }
        // index 0 holds position `degree`; rotate so index j-1 is position j
        comps.rotate_left(1);
        Ok(comps)
    }

    /// Iterated section along a path of 1-based positions.
    pub fn section_path(&self, params: &Params, path: &[u64]) -> Result<Word> {
        let mut w = self.clone();
        for &j in path {
            let comps = w.first_level_sections(params)?;
            if j == 0 || j as usize > comps.len() {
                return Err(Error::BadVertex { level: 1, index: j, degree: comps.len() as u64 });
            }
            w = comps[j as usize - 1].clone();
        }
        Ok(w)
    }

    pub fn evaluate(&self, params: &Params, depth: usize) -> Result<Portrait> {
        let mut acc = Portrait::a_power(params, self.shift, depth, self.head)?;
        if self.tail.is_empty() {
            return Ok(acc);
        }
        let b = Portrait::generator_b(params, self.shift, depth)?;
        let ord = BigInt::from(b.order(params.p()));
        for (beta, s) in &self.tail {
            let bb = b.power(&beta.mod_floor(&ord));
            acc = acc.compose(&bb)?;
            acc.add_root(*s);
        }
        Ok(acc)
    }

    pub fn is_trivial(&self, params: &Params) -> Triviality {
        if self.tail.len() <= 1 {
            return if self.is_empty() { Triviality::Trivial } else { Triviality::NonTrivial };
        }
        let (ea, eb) = self.exponent_maps();
        if ea != 0 || !eb.is_zero() {
            return Triviality::NonTrivial;
        }
        let comps = match self.first_level_sections(params) {
            Ok(c) => c,
            Err(_) => return Triviality::Undecided,
        };
        let mut undecided = false;
        for c in &comps {
            match c.is_trivial(params) {
                Triviality::NonTrivial => return Triviality::NonTrivial,
                Triviality::Undecided => undecided = true,
                Triviality::Trivial => {}
            }
        }
        if undecided {
            Triviality::Undecided
        } else {
            Triviality::Trivial
        }
    }

    /// Nonzero syllables in order.
    pub fn syllables(&self) -> Vec<Syllable> {
        let mut out = Vec::new();
        if self.head != 0 {
            out.push(Syllable::A(self.head));
        }
        for (beta, s) in &self.tail {
            out.push(Syllable::B(beta.clone()));
            if *s != 0 {
                out.push(Syllable::A(*s));
            }
        }
        out
    }

    /// Signed representative of an a-exponent in `(-m/2, m/2]`.
    pub fn signed_a(&self, s: u64) -> i64 {
        let m = self.modulus;
        if s > m / 2 {
            -((m - s) as i64)
        } else {
            s as i64
        }
    }

    pub fn one_like(&self) -> Word {
        Word { shift: self.shift, modulus: self.modulus, head: 0, tail: Vec::new() }
    }

    pub fn is_b_power(&self) -> Option<BigInt> {
        if self.head == 0 && self.tail.len() == 1 && self.tail[0].1 == 0 {
            Some(self.tail[0].0.clone())
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syllable {
    A(u64),
    B(BigInt),
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .syllables()
            .into_iter()
            .map(|syl| match syl {
                Syllable::A(1) => "a".to_string(),
                Syllable::A(s) => format!("a^{s}"),
                Syllable::B(b) if b.is_one() => "b".to_string(),
                Syllable::B(b) => format!("b^{b}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::WordExpr;

    fn p0() -> Params {
        Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap()
    }

    fn nf(s: &str) -> Word {
        WordExpr::parse(s).unwrap().normalize(&p0(), 0).unwrap()
    }

    #[test]
    fn sections_of_b() {
        let p = p0();
        let comps = nf("b").first_level_sections(&p).unwrap();
        let strs: Vec<String> = comps.iter().map(|c| c.to_string()).collect();
        assert_eq!(strs, vec!["a", "a^8", "b"]);
        assert_eq!(comps[2], Word::b(&p, 1));
        for i in 1..3 {
            let c = nf(&format!("conj(b, a^{i})")).first_level_sections(&p).unwrap();
            assert_eq!(c[i - 1], Word::b(&p, 1));
        }
        assert_eq!(nf("a").first_level_sections(&p), Err(Error::NotInStabiliser(1)));
    }

    #[test]
    fn gprime_commutator_sections() {
        // [b, b^a] has [a1^{e1}, b1] at position 1 and [b1, a1^{e2}] at position 3
        let p = p0();
        let comps = nf("comm(b, conj(b,a))").first_level_sections(&p).unwrap();
        let a1 = Word::a(&p, 1);
        let b1 = Word::b(&p, 1);
        assert_eq!(comps[0], a1.comm(&b1));
        assert!(comps[1].is_empty());
        assert_eq!(comps[2], b1.comm(&a1.pow_i64(-1)));
    }

    #[test]
    fn triviality() {
        let p = p0();
        assert_eq!(nf("comm(b,b)").is_trivial(&p), Triviality::Trivial);
        assert_eq!(nf("b^9").is_trivial(&p), Triviality::NonTrivial);
        assert_eq!(nf("comm(a^3,b)").is_trivial(&p), Triviality::Trivial);
        assert_eq!(nf("comm(b,a)").is_trivial(&p), Triviality::NonTrivial);
        // disjoint supports at level two: b1 and its a1^3-conjugate commute
        let w = WordExpr::parse("comm(b, conj(b, a^3))").unwrap().normalize(&p, 1).unwrap();
        assert!(w.blength() > 0);
        assert_eq!(w.is_trivial(&p), Triviality::Trivial);
        let deep = WordExpr::parse("comm(b, conj(b, a))").unwrap().normalize(&p, 3).unwrap();
        assert_eq!(deep.is_trivial(&p), Triviality::Undecided);
    }

    #[test]
    fn evaluation_matches_generators() {
        let p = p0();
        assert_eq!(nf("a").evaluate(&p, 1).unwrap().root_label(), 1);
        assert_eq!(nf("b").evaluate(&p, 3).unwrap(), Portrait::generator_b(&p, 0, 3).unwrap());
        assert!(nf("b^27").evaluate(&p, 3).unwrap().is_identity());
        assert!(matches!(nf("b").evaluate(&p, 5), Err(Error::OutOfPrefix { .. })));
    }

    #[test]
    fn inverse_and_power() {
        let w = nf("a*b^2*a^2*b^-1*a");
        assert!(w.mul(&w.inverse()).is_empty());
        assert_eq!(w.pow_i64(3), w.mul(&w).mul(&w));
        assert_eq!(w.pow_i64(-2), w.inverse().mul(&w.inverse()));
        assert!(w.pow_i64(0).is_empty());
    }
}
