//! Classification of defining vectors: the structural predicates and which
//! branching / congruence-subgroup results apply.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{reduce_i64, valuation};
use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BranchRoute {
    ViaDerived,
    ViaGamma3Det,
    ViaGamma3Symmetric,
    ViaTorsion,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Established,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspReport {
    /// A theorem about every such group, reported rather than computed.
    pub no_csp: bool,
    pub p_csp: Status,
    pub weak_csp: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorReport {
    pub in_f: bool,
    pub y: Vec<u64>,
    pub t: u32,
    pub in_e: bool,
    pub constant_mod_p: bool,
    #[serde(with = "crate::bigserde::big_int")]
    pub integer_sum: BigInt,
    pub sum_zero: bool,
    pub sum_nonzero_mod_p: bool,
    pub torsion_type: bool,
    pub y_symmetric: bool,
    pub branch_route: BranchRoute,
    /// `(i, k)` with `i ∈ Y` and `e_k² − e_{k−i}e_{k+i} ≢ 0 mod p`, if any.
    pub determinant_witness: Option<(u64, u64)>,
    /// `i ∈ Y` with `D − i ∉ Y`, if any.
    pub derived_witness: Option<u64>,
    pub weakly_branch: bool,
    pub csp: CspReport,
}

/// `Σ_{k=1}^{p^{m_1-i}-1} e_{k p^i} ≡ 0 mod p^{i+1}` for every `i < m_1`.
pub fn torsion_condition(params: &Params) -> bool {
    let m1 = params.m()[0];
    (0..m1).all(|i| {
        let step = params.pow(i);
        let count = params.pow(m1 - i);
        let sum: i128 = (1..count).map(|k| params.e_at(k * step) as i128).sum();
        sum.rem_euclid(params.pow(i + 1) as i128) == 0
    })
}

/// `Y(e) = { i : e_i ≢ 0 mod p }`.
pub fn support_mod_p(params: &Params) -> Vec<u64> {
    let p = params.p();
    (1..params.d()).filter(|&i| reduce_i64(params.e_at(i), p) != 0).collect()
}

pub fn determinant_witness(params: &Params, y: &[u64]) -> Option<(u64, u64)> {
    let p = params.p();
    let d = params.d();
    for &i in y {
        for k in (i + 1)..d {
            if k + i >= d {
                break;
            }
            let det = params.e_at(k) as i128 * params.e_at(k) as i128
                - params.e_at(k - i) as i128 * params.e_at(k + i) as i128;
            if det.rem_euclid(p as i128) != 0 {
                return Some((i, k));
            }
        }
    }
    None
}

fn is_gupta_sidki_shape(params: &Params) -> bool {
    let e = params.e();
    e[0] == 1 && e[1] == -1 && e[2..].iter().all(|&x| x == 0)
}

pub fn classify_vector(params: &Params) -> VectorReport {
    let p = params.p();
    let d = params.d();
    let y = support_mod_p(params);
    let in_f = !y.is_empty();
    let t = y.iter().map(|&i| valuation(i as i128, p).unwrap_or(0)).min().unwrap_or(0);
    let m1 = params.m()[0];
    let in_e = in_f && {
        let step = params.pow(t);
        let count = params.pow(m1 - t);
        let first = reduce_i64(params.e_at(step), p);
        (1..count).all(|k| reduce_i64(params.e_at(k * step), p) == first)
    };
    let first = reduce_i64(params.e_at(1), p);
    let constant_mod_p = (1..d).all(|k| reduce_i64(params.e_at(k), p) == first);
    let integer_sum: BigInt = params.e().iter().map(|&x| BigInt::from(x)).sum();
    let sum_zero = integer_sum.is_zero();
    let sum_nonzero_mod_p = !integer_sum.mod_floor(&BigInt::from(p)).is_zero();
    let torsion_type = torsion_condition(params);
    let y_set: BTreeSet<u64> = y.iter().copied().collect();
    let y_symmetric = y.iter().all(|&i| y_set.contains(&(d - i)));
    let derived_witness = y.iter().copied().find(|&i| !y_set.contains(&(d - i)));
    let determinant_witness = determinant_witness(params, &y);

    let branch_route = if !in_f {
        BranchRoute::Unknown
    } else if derived_witness.is_some() {
        BranchRoute::ViaDerived
    } else if determinant_witness.is_some() {
        BranchRoute::ViaGamma3Det
    } else if !in_e && y_symmetric {
        BranchRoute::ViaGamma3Symmetric
    } else if torsion_type {
        BranchRoute::ViaTorsion
    } else {
        BranchRoute::Unknown
    };

    let gamma3_strengthened = determinant_witness.is_some() && {
        // the branching-subgroup hypothesis: some i admitting the determinant
        // test with e_i ≢ e_{D-i} mod p
        y.iter().any(|&i| {
            let single: [u64; 1] = [i];
            determinant_witness_for(params, &single)
                && reduce_i64(params.e_at(i), p) != reduce_i64(params.e_at(d - i), p)
        })
    };
    let weak_csp = if in_f
        && !constant_mod_p
        && (branch_route == BranchRoute::ViaDerived
            || (branch_route == BranchRoute::ViaGamma3Det && gamma3_strengthened))
    {
        Status::Established
    } else {
        Status::Unknown
    };
    let p_csp = if is_gupta_sidki_shape(params) { Status::Established } else { Status::Unknown };

    VectorReport {
        in_f,
        y,
        t,
        in_e,
        constant_mod_p,
        integer_sum,
        sum_zero,
        sum_nonzero_mod_p,
        torsion_type,
        y_symmetric,
        branch_route,
        determinant_witness,
        derived_witness,
        weakly_branch: in_f,
        csp: CspReport { no_csp: true, p_csp, weak_csp },
    }
}

fn determinant_witness_for(params: &Params, y: &[u64]) -> bool {
    determinant_witness(params, y).is_some()
}

/// The defining vector of `b_i`: `e` padded with zeros to length `p^{m_{i+1}} − 1`.
pub fn shifted_vector(params: &Params, i: usize) -> Result<Vec<i64>> {
    if i + 1 >= params.levels() {
        return Err(Error::OutOfPrefix { shift: i, depth: 1, prefix: params.levels() });
    }
    let len = params.degree(i) as usize - 1;
    let mut v = params.e().to_vec();
    v.resize(len, 0);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, m: &[u32], e: &[i64]) -> Params {
        Params::new(p, m.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn gupta_sidki_growing_example() {
        let r = classify_vector(&params(3, &[1, 2, 3, 4], &[1, -1]));
        assert!(r.in_f);
        assert_eq!(r.y, vec![1, 2]);
        assert_eq!(r.t, 0);
        assert!(!r.in_e);
        assert!(r.sum_zero);
        assert!(r.torsion_type);
        assert_eq!(r.branch_route, BranchRoute::ViaGamma3Symmetric);
        assert_eq!(r.csp.p_csp, Status::Established);
        assert!(r.csp.no_csp);
    }

    #[test]
    fn not_in_f() {
        let r = classify_vector(&params(3, &[1, 2], &[3, -6]));
        assert!(!r.in_f && !r.weakly_branch && !r.in_e);
        assert_eq!(r.branch_route, BranchRoute::Unknown);
        assert_eq!(r.csp.p_csp, Status::Unknown);
        assert_eq!(r.csp.weak_csp, Status::Unknown);
    }

    #[test]
    fn nonzero_sum() {
        let p1 = params(3, &[1, 2, 3], &[1, 1]);
        let r = classify_vector(&p1);
        assert!(r.sum_nonzero_mod_p);
        assert!(!torsion_condition(&p1));
        assert!(r.in_e);
        assert!(r.constant_mod_p);
    }

    #[test]
    fn torsion_examples() {
        assert!(torsion_condition(&params(3, &[1, 2, 3, 4], &[1, -1])));
        assert!(!torsion_condition(&params(3, &[1, 2], &[1, 1])));
        // stratum sums literally zero at every i
        assert!(torsion_condition(&params(3, &[2, 3], &[1, 0, 3, 0, 0, -3, -1, 0])));
        assert!(!torsion_condition(&params(3, &[2, 3], &[1, 0, 1, 0, 0, 1, -2, 0])));
    }

    #[test]
    fn route_precedence() {
        // Y = {1}, D - 1 = 8 ∉ Y
        let r = classify_vector(&params(3, &[2, 3], &[1, 0, 0, 0, 0, 0, 0, 3]));
        assert_eq!(r.branch_route, BranchRoute::ViaDerived);
        assert_eq!(r.derived_witness, Some(1));
        assert_eq!(r.csp.weak_csp, Status::Established);
        // p = 5: Y = {1,2,3,4}; k = 2, i = 1: e_2² − e_1 e_3 = 4 − 0 ≢ 0
        let r = classify_vector(&params(5, &[1, 2, 3], &[1, 2, 0, 4]));
        assert_eq!(r.branch_route, BranchRoute::ViaDerived);
        let r = classify_vector(&params(5, &[1, 2, 3], &[1, 2, 1, 2]));
        assert_eq!(r.branch_route, BranchRoute::ViaGamma3Det);
        assert_eq!(r.determinant_witness, Some((1, 2)));
        assert_eq!(r.csp.weak_csp, Status::Established);
        // constant vector with non-zero sum: no route applies
        let r = classify_vector(&params(5, &[1, 2, 3], &[1, 1, 1, 1]));
        assert_eq!(r.branch_route, BranchRoute::Unknown);
        assert!(r.in_e && r.weakly_branch);
    }

    #[test]
    fn shifted_vectors() {
        let p = params(3, &[1, 2, 3, 4], &[1, -1]);
        assert_eq!(shifted_vector(&p, 1).unwrap(), vec![1, -1, 0, 0, 0, 0, 0, 0]);
        let v = shifted_vector(&p, 2).unwrap();
        assert_eq!(v.len(), 26);
        assert!(v[2..].iter().all(|&x| x == 0));
        assert!(matches!(shifted_vector(&p, 3), Err(Error::OutOfPrefix { .. })));
    }
}
