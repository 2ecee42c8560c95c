//! Depth-truncated automorphisms of the tree with growing p-power degrees.
//!
//! A portrait stores one cyclic-shift exponent per internal vertex. Level `l`
//! is a flat vector indexed in mixed radix: the child `x` (1-based) of the
//! vertex with index `v` has index `v * degree + (x - 1)`.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, big_pow, neg_mod, reduce_i64};
use crate::error::{Error, Result};
use crate::params::Params;

/// A vertex of the tree shifted by `shift` levels; `path` holds 1-based
/// child indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub shift: usize,
    pub path: Vec<u64>,
}

impl Vertex {
    pub fn new(shift: usize, path: Vec<u64>) -> Self {
        Vertex { shift, path }
    }

    pub fn root(shift: usize) -> Self {
        Vertex { shift, path: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Portrait {
    shift: usize,
    /// `degrees[l]` is the number of children of a vertex at relative level `l`,
    /// which is also the modulus of the labels on that level.
    degrees: Vec<u64>,
    labels: Vec<Vec<u64>>,
}

impl Portrait {
    pub fn identity(params: &Params, shift: usize, depth: usize) -> Result<Self> {
        params.check_range(shift, depth)?;
        if depth == 0 {
            return Err(Error::BadInput("portrait depth must be at least 1".into()));
        }
        let degrees = params.degrees()[shift..shift + depth].to_vec();
        Ok(Self::zero(shift, degrees))
    }

    fn zero(shift: usize, degrees: Vec<u64>) -> Self {
        let mut labels = Vec::with_capacity(degrees.len());
        let mut width = 1usize;
        for &d in &degrees {
            labels.push(vec![0; width]);
            width *= d as usize;
        }
        Portrait { shift, degrees, labels }
    }

    /// The rooted generator `a_shift` raised to `s`.
    pub fn a_power(params: &Params, shift: usize, depth: usize, s: u64) -> Result<Self> {
        let mut f = Self::identity(params, shift, depth)?;
        f.labels[0][0] = s % f.degrees[0];
        Ok(f)
    }

    pub fn generator_a(params: &Params, shift: usize, depth: usize) -> Result<Self> {
        Self::a_power(params, shift, depth, 1)
    }

    /// The directed generator `b_shift`: child `j < p^{m_1}` carries
    /// `a_{shift+1}^{e_j}`, the last child recurses, all others are trivial.
    pub fn generator_b(params: &Params, shift: usize, depth: usize) -> Result<Self> {
        let mut f = Self::identity(params, shift, depth)?;
        let mut v = 0usize;
        for l in 1..depth {
            let deg_parent = f.degrees[l - 1] as usize;
            let modulus = f.degrees[l];
            for j in 1..params.d() {
                f.labels[l][v * deg_parent + (j as usize - 1)] = reduce_i64(params.e_at(j), modulus);
            }
            v = v * deg_parent + (deg_parent - 1);
        }
        Ok(f)
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn depth(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Labels of relative level `l`, in mixed-radix vertex order.
    pub fn level(&self, l: usize) -> &[u64] {
        &self.labels[l]
    }

    pub fn root_label(&self) -> u64 {
        self.labels[0][0]
    }

    /// Right multiplication by `a^s`: only the root label changes.
    pub(crate) fn add_root(&mut self, s: u64) {
        self.labels[0][0] = add_mod(self.labels[0][0], s % self.degrees[0], self.degrees[0]);
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|lvl| lvl.iter().all(|&x| x == 0))
    }

    /// Fixes every vertex up to relative level `k`.
    pub fn in_level_stabiliser(&self, k: usize) -> bool {
        self.labels.iter().take(k).all(|lvl| lvl.iter().all(|&x| x == 0))
    }

    /// Label at a vertex (path given as 1-based indices).
    pub fn label(&self, path: &[u64]) -> Result<u64> {
        if path.len() >= self.depth() {
            return Err(Error::DepthExceeded { len: path.len(), depth: self.depth() });
        }
        let idx = self.index_of(path)?;
        Ok(self.labels[path.len()][idx])
    }

    fn index_of(&self, path: &[u64]) -> Result<usize> {
        let mut idx = 0usize;
        for (l, &x) in path.iter().enumerate() {
            let d = self.degrees[l];
            if x == 0 || x > d {
                return Err(Error::BadVertex { level: l + 1, index: x, degree: d });
            }
            idx = idx * d as usize + (x - 1) as usize;
        }
        Ok(idx)
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.shift == other.shift && self.degrees == other.degrees
    }

    /// `images[l][v]` is the index of `v^f` for every vertex on level `l < depth`.
    fn images(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(self.depth());
        out.push(vec![0]);
        for l in 1..self.depth() {
            let d = self.degrees[l - 1] as usize;
            let prev = &out[l - 1];
            let mut cur = vec![0usize; prev.len() * d];
            for (v, &img) in prev.iter().enumerate() {
                let shift = self.labels[l - 1][v] as usize;
                for x in 0..d {
                    cur[v * d + x] = img * d + (x + shift) % d;
                }
            }
            out.push(cur);
        }
        out
    }

    /// The product `fg` under the right action `v^{fg} = (v^f)^g`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !self.same_shape(g) {
            return Err(Error::ShapeMismatch);
        }
        let imgs = self.images();
        let labels = (0..self.depth())
            .map(|l| {
                let m = self.degrees[l];
                self.labels[l].iter().zip(&imgs[l]).map(|(&x, &w)| add_mod(x, g.labels[l][w], m)).collect()
            })
            .collect();
        Ok(Portrait { shift: self.shift, degrees: self.degrees.clone(), labels })
    }

    pub fn invert(&self) -> Self {
        let imgs = self.images();
        let labels = self
            .labels
            .iter()
            .zip(&imgs)
            .zip(&self.degrees)
            .map(|((lvl, img), &m)| {
                let mut out = vec![0u64; lvl.len()];
                for (v, &w) in img.iter().enumerate() {
                    out[w] = neg_mod(lvl[v], m);
                }
                out
            })
            .collect();
        Portrait { shift: self.shift, degrees: self.degrees.clone(), labels }
    }

    /// `g^{-1} f g`.
    pub fn conjugate(&self, g: &Self) -> Result<Self> {
        g.invert().compose(self)?.compose(g)
    }

    /// `f^{-1} g^{-1} f g`.
    pub fn commutator(&self, g: &Self) -> Result<Self> {
        self.invert().compose(&g.invert())?.compose(self)?.compose(g)
    }

    pub fn apply(&self, v: &Vertex) -> Result<Vertex> {
        if v.path.len() > self.depth() {
            return Err(Error::DepthExceeded { len: v.path.len(), depth: self.depth() });
        }
        self.index_of(&v.path)?;
        let mut idx = 0usize;
        let mut out = Vec::with_capacity(v.path.len());
        for (l, &x) in v.path.iter().enumerate() {
            let d = self.degrees[l];
            let y = (x - 1 + self.labels[l][idx]) % d + 1;
            out.push(y);
            idx = idx * d as usize + (x - 1) as usize;
        }
        Ok(Vertex { shift: v.shift, path: out })
    }

    /// The section at `v`: a portrait of depth `depth - |v|` on the tree shifted
    /// by `|v|` further levels.
    pub fn section(&self, v: &Vertex) -> Result<Self> {
        let len = v.path.len();
        if len > self.depth() {
            return Err(Error::DepthExceeded { len, depth: self.depth() });
        }
        let u = self.index_of(&v.path)?;
        let degrees = self.degrees[len..].to_vec();
        let mut labels = Vec::with_capacity(degrees.len());
        let mut width = 1usize;
        for (k, &d) in degrees.iter().enumerate() {
            labels.push(self.labels[len + k][u * width..(u + 1) * width].to_vec());
            width *= d as usize;
        }
        Ok(Portrait { shift: self.shift + len, degrees, labels })
    }

    pub fn truncate(&self, depth: usize) -> Self {
        let depth = depth.min(self.depth());
        Portrait { shift: self.shift, degrees: self.degrees[..depth].to_vec(), labels: self.labels[..depth].to_vec() }
    }

    pub fn one(&self) -> Self {
        Self::zero(self.shift, self.degrees.clone())
    }

    pub fn pow_u64(&self, mut k: u64) -> Self {
        let mut acc = self.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("same shape");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("same shape");
            }
        }
        acc
    }

    pub fn power(&self, k: &BigInt) -> Self {
        let (sign, mag) = (k.sign(), k.magnitude());
        let base = if sign == Sign::Minus { self.invert() } else { self.clone() };
        let mut acc = self.one();
        let mut sq = base;
        let bits = mag.bits();
        for i in 0..bits {
            if mag.bit(i) {
                acc = acc.compose(&sq).expect("same shape");
            }
            if i + 1 < bits {
                sq = sq.compose(&sq).expect("same shape");
            }
        }
        acc
    }

    /// Upper bound on `log_p` of any element order at this shape.
    fn order_exponent_bound(&self, p: u64) -> u32 {
        self.degrees.iter().map(|&d| exponent_of(d, p)).sum()
    }

    /// `k` such that the order is `p^k`.
    pub fn order_exponent(&self, p: u64) -> u32 {
        let bound = self.order_exponent_bound(p);
        let mut g = self.clone();
        let mut k = 0;
        while !g.is_identity() {
            assert!(k < bound, "element order exceeds the wreath-product bound");
            g = g.pow_u64(p);
            k += 1;
        }
        k
    }

    pub fn order(&self, p: u64) -> BigUint {
        big_pow(p, self.order_exponent(p))
    }

    pub fn level_label_sums(&self) -> Vec<u64> {
        self.labels
            .iter()
            .zip(&self.degrees)
            .map(|(lvl, &m)| lvl.iter().fold(0u64, |acc, &x| add_mod(acc, x, m)))
            .collect()
    }

    /// Number of internal vertices carrying a nonzero label.
    pub fn support_count(&self) -> usize {
        self.labels.iter().map(|lvl| lvl.iter().filter(|&&x| x != 0).count()).sum()
    }

    /// Canonical conjugacy code: the order and level sums of `f`, then for every cycle of `f`
    /// on the first level the cycle length and, recursively, the code of the
    /// product of the sections along that cycle; entries sorted. On fixed
    /// children the cycle product is just the section, so for level-one
    /// stabiliser elements this is the tree of section orders.
    pub fn canonical_order_tree(&self, p: u64) -> String {
        let sums: Vec<String> = self.level_label_sums().iter().map(|x| x.to_string()).collect();
        let order = format!("{}/{}", self.order(p), sums.join("."));
        if self.depth() == 1 {
            return order;
        }
        let d = self.degrees[0];
        let r = self.labels[0][0];
        let sections: Vec<Portrait> =
            (1..=d).map(|x| self.section(&Vertex::new(self.shift, vec![x])).expect("child within depth")).collect();
        let mut seen = vec![false; d as usize];
        let mut kids = Vec::new();
        for start in 0..d as usize {
            if seen[start] {
                continue;
            }
            let mut product = sections[start].clone();
            seen[start] = true;
            let mut len = 1;
            let mut x = (start + r as usize) % d as usize;
            while x != start {
                seen[x] = true;
                product = product.compose(&sections[x]).expect("same shape");
                len += 1;
                x = (x + r as usize) % d as usize;
            }
            kids.push(format!("{len}:{}", product.canonical_order_tree(p)));
        }
        kids.sort();
        format!("{order}({})", kids.join(","))
    }

    /// Graphviz rendering: one node per vertex of the truncated tree. Internal
    /// vertices show their label and modulus.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph portrait {\n  node [shape=box, fontsize=10];\n");
        let mut paths: Vec<Vec<u64>> = vec![Vec::new()];
        for l in 0..=self.depth() {
            let mut next = Vec::new();
            for (idx, path) in paths.iter().enumerate() {
                let name = node_name(path);
                let shown = if path.is_empty() {
                    "()".to_string()
                } else {
                    path.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                };
                if l < self.depth() {
                    let _ = writeln!(
                        out,
                        "  {name} [label=\"v={shown} lbl={} mod {}\"];",
                        self.labels[l][idx], self.degrees[l]
                    );
                    for x in 1..=self.degrees[l] {
                        let mut child = path.clone();
                        child.push(x);
                        let _ = writeln!(out, "  {name} -> {};", node_name(&child));
                        next.push(child);
                    }
                } else {
                    let _ = writeln!(out, "  {name} [label=\"v={shown}\"];");
                }
            }
            paths = next;
        }
        out.push_str("}\n");
        out
    }
}

fn node_name(path: &[u64]) -> String {
    let mut s = String::from("n");
    for x in path {
        let _ = write!(s, "_{x}");
    }
    s
}

fn exponent_of(d: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut x = d;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::WordExpr;

    fn p0() -> Params {
        Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap()
    }

    fn eval(s: &str, depth: usize) -> Portrait {
        WordExpr::parse(s).unwrap().normalize(&p0(), 0).unwrap().evaluate(&p0(), depth).unwrap()
    }

    #[test]
    fn identity_shapes() {
        let p = p0();
        let id = Portrait::identity(&p, 0, 2).unwrap();
        assert_eq!(id.level(0).len() + id.level(1).len(), 4);
        let id1 = Portrait::identity(&p, 1, 1).unwrap();
        assert_eq!(id1.degrees(), &[9]);
        assert!(matches!(Portrait::identity(&p, 0, 9), Err(Error::OutOfPrefix { .. })));
    }

    #[test]
    fn compose_invert_power() {
        let p = p0();
        let a = Portrait::generator_a(&p, 0, 1).unwrap();
        assert_eq!(a.compose(&a).unwrap().root_label(), 2);
        assert_eq!(a.invert().root_label(), 2);
        assert!(a.pow_u64(3).is_identity());
        assert!(a.power(&BigInt::from(0)).is_identity());
        let b2 = eval("b", 2);
        assert_eq!(b2.compose(&b2).unwrap(), eval("b^2", 2));
        assert_eq!(eval("b", 3).invert(), eval("b^-1", 3));
        assert!(b2.pow_u64(9).is_identity());
        let other = Portrait::identity(&p, 0, 3).unwrap();
        assert_eq!(b2.compose(&other), Err(Error::ShapeMismatch));
    }

    #[test]
    fn apply_and_section() {
        let p = p0();
        let a = Portrait::generator_a(&p, 0, 1).unwrap();
        assert_eq!(a.apply(&Vertex::new(0, vec![1])).unwrap().path, vec![2]);
        assert_eq!(eval("b", 2).apply(&Vertex::new(0, vec![3, 1])).unwrap().path, vec![3, 1]);
        assert_eq!(eval("b", 2).apply(&Vertex::new(0, vec![1, 1])).unwrap().path, vec![1, 2]);
        assert!(matches!(a.apply(&Vertex::new(0, vec![1, 1])), Err(Error::DepthExceeded { .. })));
        let b3 = eval("b", 3);
        let s3 = b3.section(&Vertex::new(0, vec![3])).unwrap();
        assert_eq!(s3, Portrait::generator_b(&p, 1, 2).unwrap());
        let s1 = b3.section(&Vertex::new(0, vec![1])).unwrap();
        assert_eq!(s1, Portrait::generator_a(&p, 1, 2).unwrap());
        assert_eq!(s1.degrees()[0], 9);
    }

    #[test]
    fn b_portrait_labels() {
        let b = eval("b", 2);
        assert_eq!(b.level(0), &[0]);
        assert_eq!(b.level(1), &[1, 8, 0]);
    }

    #[test]
    fn orders() {
        let p = p0();
        assert_eq!(Portrait::generator_a(&p, 0, 3).unwrap().order(3), BigUint::from(3u32));
        assert_eq!(Portrait::identity(&p, 0, 3).unwrap().order(3), BigUint::from(1u32));
        assert_eq!(eval("a*b", 3).order(3), BigUint::from(81u32));
        assert_eq!(eval("b", 3).order(3), BigUint::from(27u32));
    }

    #[test]
    fn label_sums_and_codes() {
        let p = p0();
        assert_eq!(Portrait::generator_a(&p, 0, 2).unwrap().level_label_sums(), vec![1, 0]);
        assert_eq!(eval("b", 2).level_label_sums(), vec![0, 0]);
        assert_eq!(Portrait::identity(&p, 0, 2).unwrap().canonical_order_tree(3), "1/0.0(1:1/0,1:1/0,1:1/0)");
        assert_ne!(eval("b", 2).canonical_order_tree(3), eval("a", 2).canonical_order_tree(3));
    }

    #[test]
    fn dot_export() {
        let dot = eval("b", 2).to_dot();
        assert!(dot.contains("v=() lbl=0 mod 3"));
        assert!(dot.contains("v=2 lbl=8 mod 9"));
        assert!(dot.contains("n -> n_3"));
        assert_eq!(dot.matches("[label=").count(), 1 + 3 + 27);
    }
}
