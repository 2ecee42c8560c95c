use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_u64, reduce_i64};
use crate::error::{Error, Result};

/// Residues are kept in `u64`; degrees above this bound are rejected so that
/// sums of two residues never overflow.
const MAX_DEGREE: u64 = 1 << 62;

/// A validated group configuration: prime `p`, exponent prefix `m` and
/// defining vector `e` (stored 0-based, so `e[j-1]` is `e_j`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    p: u64,
    m: Vec<u32>,
    e: Vec<i64>,
    degrees: Vec<u64>,
}

impl Params {
    pub fn new(p: u64, m: Vec<u32>, e: Vec<i64>) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m.len() < 2 || m[0] == 0 || m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing);
        }
        let mut degrees = Vec::with_capacity(m.len());
        for &mi in &m {
            match p.checked_pow(mi) {
                Some(d) if d <= MAX_DEGREE => degrees.push(d),
                _ => return Err(Error::DegreeTooLarge(mi)),
            }
        }
        let expected = (degrees[0] - 1) as usize;
        if e.len() != expected {
            return Err(Error::BadVectorLength { expected, found: e.len() });
        }
        let bound = degrees[1] - 1;
        for (idx, &x) in e.iter().enumerate() {
            if x.unsigned_abs() > bound {
                return Err(Error::EntryOutOfRange { index: idx + 1, value: x });
            }
        }
        if e.iter().all(|&x| x == 0) {
            return Err(Error::VectorAllZero);
        }
        Ok(Params { p, m, e, degrees })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn e(&self) -> &[i64] {
        &self.e
    }

    /// Prefix length `N`.
    pub fn levels(&self) -> usize {
        self.m.len()
    }

    /// `p^{m_{k+1}}`: the number of children of a vertex at absolute level `k`,
    /// equivalently the order of `a_k`.
    pub fn degree(&self, k: usize) -> u64 {
        self.degrees[k]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// `p^{m_1}`.
    pub fn d(&self) -> u64 {
        self.degrees[0]
    }

    /// `e_j` for `1 <= j <= p^{m_1} - 1`, and 0 for larger `j` (the convention of
    /// the shifted generators).
    pub fn e_at(&self, j: u64) -> i64 {
        if j == 0 || j as usize > self.e.len() {
            0
        } else {
            self.e[j as usize - 1]
        }
    }

    /// `e_j` reduced modulo `m`.
    pub fn e_mod(&self, j: u64, m: u64) -> u64 {
        reduce_i64(self.e_at(j), m)
    }

    pub fn pow(&self, k: u32) -> u64 {
        pow_u64(self.p, k)
    }

    pub fn check_range(&self, shift: usize, depth: usize) -> Result<()> {
        if shift + depth > self.m.len() {
            return Err(Error::OutOfPrefix { shift, depth, prefix: self.m.len() });
        }
        Ok(())
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={} m={:?} e={:?}", self.p, self.m, self.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        assert!(Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).is_ok());
        assert_eq!(Params::new(3, vec![1, 2], vec![0, 0]), Err(Error::VectorAllZero));
        assert_eq!(Params::new(3, vec![2, 1], vec![1; 8]), Err(Error::NotIncreasing));
        assert_eq!(Params::new(3, vec![1], vec![1, 1]), Err(Error::NotIncreasing));
        assert_eq!(Params::new(9, vec![1, 2], vec![1; 8]), Err(Error::NotPrime(9)));
        assert_eq!(Params::new(2, vec![1, 2], vec![1]), Err(Error::NotPrime(2)));
        assert_eq!(Params::new(3, vec![1, 2], vec![1]), Err(Error::BadVectorLength { expected: 2, found: 1 }));
        assert_eq!(Params::new(3, vec![1, 2], vec![9, 0]), Err(Error::EntryOutOfRange { index: 1, value: 9 }));
        assert!(Params::new(3, vec![1, 2], vec![-8, 8]).is_ok());
    }

    #[test]
    fn shifted_entries() {
        let p = Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).unwrap();
        assert_eq!(p.e_at(1), 1);
        assert_eq!(p.e_at(2), -1);
        assert_eq!(p.e_at(3), 0);
        assert_eq!(p.e_mod(2, 9), 8);
        assert_eq!(p.degree(3), 81);
    }
}
