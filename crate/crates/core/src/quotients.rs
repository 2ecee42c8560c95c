//! Congruence quotients `G/st_G(n)`: conjugacy fingerprints and a fully
//! enumerated table for small `n` used as a brute-force oracle.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::big_pow;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::tree::{Portrait, Vertex};
use crate::word::Word;

pub const DEFAULT_SIZE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantRecord {
    #[serde(with = "crate::bigserde::big_uint")]
    pub order: BigUint,
    pub root_label: u64,
    pub in_level1_stab: bool,
    /// First-level children with nontrivial section; only for stabiliser elements.
    pub support_count: Option<usize>,
    pub level_sums: Vec<u64>,
    pub order_tree_code: String,
}

pub fn quotient_element(params: &Params, w: &Word, n: usize) -> Result<Portrait> {
    w.evaluate(params, n)
}

pub fn element_order_mod_level(params: &Params, w: &Word, n: usize) -> Result<BigUint> {
    Ok(w.evaluate(params, n)?.order(params.p()))
}

/// Number of first-level children whose section is nontrivial.
pub fn first_level_support(f: &Portrait) -> usize {
    if f.depth() < 2 {
        return 0;
    }
    (1..=f.degrees()[0])
        .filter(|&x| !f.section(&Vertex::new(f.shift(), vec![x])).expect("child within depth").is_identity())
        .count()
}

pub fn conjugacy_invariants(params: &Params, f: &Portrait) -> InvariantRecord {
    let p = params.p();
    let in_level1_stab = f.root_label() == 0;
    InvariantRecord {
        order: f.order(p),
        root_label: f.root_label(),
        in_level1_stab,
        support_count: in_level1_stab.then(|| first_level_support(f)),
        level_sums: f.level_label_sums(),
        order_tree_code: f.canonical_order_tree(p),
    }
}

/// `p^{m_1} · Π_{l=1}^{n-1} (p^{m_{l+1}})^{#level-l vertices}`: the order of the
/// ambient iterated wreath product of cyclic groups.
pub fn ambient_bound(params: &Params, shift: usize, n: usize) -> BigUint {
    let p = params.p();
    let mut log = 0u64;
    let mut vertices = BigUint::one();
    let mut total = BigUint::one();
    for l in 0..n {
        let m = params.m()[shift + l] as u64;
        // (p^m)^{vertices}
        let exponent = &vertices * m;
        match u32::try_from(&exponent) {
            Ok(e) if log + e as u64 <= 1 << 20 => {
                log += e as u64;
                total *= big_pow(p, e);
            }
            _ => {
                // astronomically large; saturate far above any usable cap
                return big_pow(p, 1 << 20);
            }
        }
        vertices *= params.degree(shift + l);
    }
    total
}

#[derive(Debug, Clone)]
pub struct GroupTable {
    params: Params,
    level: usize,
    elements: Vec<Portrait>,
    index: HashMap<Portrait, usize>,
}

/// Breadth-first closure of the generator portraits at depth `n`, in the fixed
/// generator order `a, b, a⁻¹, b⁻¹`.
pub fn enumerate_small_quotient(params: &Params, n: usize, size_cap: u64) -> Result<GroupTable> {
    params.check_range(0, n)?;
    let bound = ambient_bound(params, 0, n);
    if bound > BigUint::from(size_cap) {
        let shown = if bound.bits() > 256 { format!("~2^{}", bound.bits()) } else { bound.to_string() };
        return Err(Error::CapExceeded { bound: shown, cap: size_cap });
    }
    let a = Portrait::generator_a(params, 0, n)?;
    let b = Portrait::generator_b(params, 0, n)?;
    let gens = [a.clone(), b.clone(), a.invert(), b.invert()];
    let id = a.one();
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let h = elements[i].compose(g)?;
            if !index.contains_key(&h) {
                index.insert(h.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(h);
            }
        }
    }
    Ok(GroupTable { params: params.clone(), level: n, elements, index })
}

impl GroupTable {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Portrait] {
        &self.elements
    }

    pub fn index_of(&self, f: &Portrait) -> Result<usize> {
        self.index.get(f).copied().ok_or(Error::NotMember)
    }

    pub fn contains(&self, f: &Portrait) -> bool {
        self.index.contains_key(f)
    }

    /// Exhaustive search for `h` with `f^h = g`.
    pub fn oracle_conjugate(&self, f: &Portrait, g: &Portrait) -> Result<bool> {
        self.index_of(f)?;
        self.index_of(g)?;
        for h in &self.elements {
            if &f.conjugate(h)? == g {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Class index of every element, from orbits under conjugation by the
    /// generators.
    pub fn conjugacy_classes(&self) -> Vec<usize> {
        let n = self.level;
        let a = Portrait::generator_a(&self.params, 0, n).expect("table depth");
        let b = Portrait::generator_b(&self.params, 0, n).expect("table depth");
        let gens = [a, b];
        let mut class = vec![usize::MAX; self.len()];
        let mut next = 0;
        for start in 0..self.len() {
            if class[start] != usize::MAX {
                continue;
            }
            class[start] = next;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for g in &gens {
                    let j = self.index[&self.elements[i].conjugate(g).expect("same shape")];
                    if class[j] == usize::MAX {
                        class[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        class
    }

    /// Subgroup generated by all commutators of table elements.
    pub fn oracle_derived_subgroup(&self) -> HashSet<Portrait> {
        let mut comms: HashSet<Portrait> = HashSet::new();
        for x in &self.elements {
            for y in &self.elements {
                comms.insert(x.commutator(y).expect("same shape"));
            }
        }
        subgroup_closure(comms.into_iter().collect(), &self.elements[0])
    }

    pub fn export_lines(&self) -> Vec<String> {
        self.elements.iter().map(encode).collect()
    }
}

/// Canonical text encoding: levels separated by `|`, labels by `,`.
pub fn encode(f: &Portrait) -> String {
    (0..f.depth())
        .map(|l| f.level(l).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn subgroup_closure(gens: Vec<Portrait>, identity: &Portrait) -> HashSet<Portrait> {
    let mut set: HashSet<Portrait> = HashSet::from([identity.clone()]);
    let mut queue: VecDeque<Portrait> = VecDeque::from([identity.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x.compose(g).expect("same shape");
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    set
}

pub fn is_central(params: &Params, w: &Word, n: usize) -> Result<bool> {
    let f = w.evaluate(params, n)?;
    let a = Portrait::generator_a(params, w.shift(), n)?;
    let b = Portrait::generator_b(params, w.shift(), n)?;
    Ok(f.compose(&a)? == a.compose(&f)? && f.compose(&b)? == b.compose(&f)?)
}

/// Result of comparing the fingerprint against the exhaustive conjugacy
/// classes of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintReport {
    pub table_size: usize,
    pub classes: usize,
    pub distinct_records: usize,
    /// Conjugate elements always share a record.
    pub sound: bool,
    /// Distinct classes always have distinct records.
    pub complete: bool,
}

pub fn fingerprint_report(table: &GroupTable) -> FingerprintReport {
    let class = table.conjugacy_classes();
    let records: Vec<InvariantRecord> =
        table.elements().iter().map(|f| conjugacy_invariants(table.params(), f)).collect();
    let mut by_class: HashMap<usize, &InvariantRecord> = HashMap::new();
    let mut sound = true;
    for (c, r) in class.iter().zip(&records) {
        if let Some(prev) = by_class.insert(*c, r) {
            sound &= prev == r;
        }
    }
    let distinct: HashSet<&InvariantRecord> = records.iter().collect();
    let classes = by_class.len();
    FingerprintReport {
        table_size: table.len(),
        classes,
        distinct_records: distinct.len(),
        sound,
        complete: sound && distinct.len() == classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::WordExpr;

    fn p0() -> Params {
        Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap()
    }

    fn nf(params: &Params, s: &str) -> Word {
        WordExpr::parse(s).unwrap().normalize(params, 0).unwrap()
    }

    #[test]
    fn quotient_elements_and_orders() {
        let p = p0();
        assert!(quotient_element(&p, &nf(&p, "b"), 1).unwrap().is_identity());
        for n in 2..=4 {
            let pow = p.degree(n - 1);
            assert!(quotient_element(&p, &nf(&p, &format!("b^{pow}")), n).unwrap().is_identity());
        }
        assert_eq!(element_order_mod_level(&p, &nf(&p, "b"), 3).unwrap(), BigUint::from(27u32));
        assert_eq!(element_order_mod_level(&p, &nf(&p, "a*b"), 3).unwrap(), BigUint::from(81u32));
        assert_eq!(element_order_mod_level(&p, &nf(&p, "a*b^3"), 3).unwrap(), BigUint::from(27u32));
    }

    #[test]
    fn invariant_examples() {
        let p = p0();
        let n = 3;
        let f = nf(&p, "b^9").evaluate(&p, n).unwrap();
        assert_eq!(conjugacy_invariants(&p, &f).support_count, Some(1));
        let f = nf(&p, "(a*b)^27").evaluate(&p, n).unwrap();
        let r = conjugacy_invariants(&p, &f);
        assert!(r.in_level1_stab);
        assert_eq!(r.support_count, Some(3));
        let f = nf(&p, "a^-2").evaluate(&p, n).unwrap();
        assert_ne!(conjugacy_invariants(&p, &f).root_label, 0);
    }

    #[test]
    fn small_tables() {
        let p = p0();
        assert_eq!(enumerate_small_quotient(&p, 1, DEFAULT_SIZE_CAP).unwrap().len(), 3);
        assert_eq!(ambient_bound(&p, 0, 2), BigUint::from(2187u32));
        assert!(matches!(enumerate_small_quotient(&p, 3, DEFAULT_SIZE_CAP), Err(Error::CapExceeded { .. })));
        let t1 = enumerate_small_quotient(&p, 1, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(t1.oracle_derived_subgroup().len(), 1);
    }

    #[test]
    fn level_two_oracles() {
        let p = p0();
        let t = enumerate_small_quotient(&p, 2, DEFAULT_SIZE_CAP).unwrap();
        let a = Portrait::generator_a(&p, 0, 2).unwrap();
        let b = Portrait::generator_b(&p, 0, 2).unwrap();
        assert!(t.oracle_conjugate(&a, &a).unwrap());
        assert!(!t.oracle_conjugate(&a, &b).unwrap());
        let stray = Portrait::identity(&p, 0, 3).unwrap();
        assert_eq!(t.oracle_conjugate(&stray, &a), Err(Error::NotMember));
        // G/G' is abelian: every commutator of the table lies in the derived subgroup
        let derived = t.oracle_derived_subgroup();
        assert!(t.len().is_multiple_of(derived.len()));
        assert!(derived.contains(&a.commutator(&b).unwrap()));
        assert!(!derived.contains(&a));
    }

    #[test]
    fn centrality() {
        let p = p0();
        assert!(is_central(&p, &Word::identity(&p, 0), 2).unwrap());
        assert!(!is_central(&p, &Word::a(&p, 0), 2).unwrap());
        let p1 = Params::new(3, vec![1, 2, 3], vec![1, 1]).unwrap();
        assert!(is_central(&p1, &nf(&p1, "(a*b)^3"), 2).unwrap());
    }
}
