//! Small exact-arithmetic helpers shared by the group modules.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduce a signed integer into `0..modulus`.
pub fn reduce_i64(x: i64, modulus: u64) -> u64 {
    (x as i128).rem_euclid(modulus as i128) as u64
}

pub fn reduce_i128(x: i128, modulus: u64) -> u64 {
    x.rem_euclid(modulus as i128) as u64
}

pub fn reduce_big(x: &BigInt, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    x.mod_floor(&m).to_u64().expect("residue fits u64")
}

pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - (b % m) as u128) % m as u128) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a.is_multiple_of(m) {
        0
    } else {
        m - a % m
    }
}

/// Modular inverse by extended gcd; `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: i128, m: u64) -> Option<u64> {
    let m = m as i128;
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m) as u64)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut x = x.abs();
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Some(v)
}

pub fn valuation_big(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

pub fn pow_u64(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("power fits u64")
}

pub fn big_pow(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

pub fn big_int_pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Exponent `k` with `n == p^k`, if `n` is a power of `p`.
pub fn log_p(n: &BigUint, p: u64) -> Option<u32> {
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut k = 0;
    if n.is_zero() {
        return None;
    }
    while !n.is_one() {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        n = q;
        k += 1;
    }
    Some(k)
}
