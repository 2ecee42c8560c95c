//! Integer lattices: Hermite normal form and exact membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Row-style Hermite normal form of the lattice spanned by `rows`; zero rows
/// are dropped, pivots are positive and entries above a pivot are reduced.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row >= m.len() {
            break;
        }
        // Euclid on column c among rows pivot_row..
        loop {
            let nonzero: Vec<usize> = (pivot_row..m.len()).filter(|&r| !m[r][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&r| m[r][c].abs()).unwrap();
            m.swap(pivot_row, best);
            let mut done = true;
            for r in (pivot_row + 1)..m.len() {
                if !m[r][c].is_zero() {
                    let q = m[r][c].div_floor(&m[pivot_row][c]);
                    let (head, tail) = m.split_at_mut(r);
                    for (x, y) in tail[0].iter_mut().zip(&head[pivot_row]) {
                        *x -= &q * y;
                    }
                    if !m[r][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && !m[pivot_row][c].is_zero() {
            if m[pivot_row][c].is_negative() {
                for x in m[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
            }
            for r in 0..pivot_row {
                let q = m[r][c].div_floor(&m[pivot_row][c]);
                if !q.is_zero() {
                    let (head, tail) = m.split_at_mut(pivot_row);
                    for (x, y) in head[r].iter_mut().zip(&tail[0]) {
                        *x -= &q * y;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    m
}

/// Whether `v` is an integer combination of `rows`.
pub fn in_span(rows: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let h = hermite_normal_form(rows);
    let mut v: Vec<BigInt> = v.to_vec();
    for row in &h {
        let c = match row.iter().position(|x| !x.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        if v[..c].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, r) = v[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for (x, y) in v.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn membership() {
        let rows = vec![row(&[2, 0]), row(&[0, 3])];
        assert!(in_span(&rows, &row(&[4, -3])));
        assert!(!in_span(&rows, &row(&[1, 0])));
        let rows = vec![row(&[2, 4]), row(&[3, 5])];
        // determinant -2: lattice has index 2
        assert!(in_span(&rows, &row(&[1, 1])));
        assert!(!in_span(&rows, &row(&[1, 0])));
        assert!(in_span(&[], &row(&[0, 0])));
        assert!(!in_span(&[], &row(&[0, 1])));
    }

    #[test]
    fn hnf_is_echelon() {
        let h = hermite_normal_form(&[row(&[4, 6, 2]), row(&[6, 9, 3]), row(&[2, 3, 1])]);
        assert_eq!(h, vec![row(&[2, 3, 1])]);
    }
}
