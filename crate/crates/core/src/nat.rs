//! Pairing and small combinatorial codings used throughout the crate.
//!
//! The Cantor pairing function is the single schedule for every dovetailed
//! search in this crate, so traces from different operations can be compared
//! position by position.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Cantor pairing `(a, b) -> (a + b)(a + b + 1)/2 + b`.
///
/// Total on the mathematical naturals; on `u64` it panics if the result does
/// not fit. Use [`big_pair`] when inputs may be large.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    let v = s * (s + 1) / 2 + b as u128;
    u64::try_from(v).expect("cantor pair exceeds u64; use big_pair")
}

/// [`pair`] without the panic: `None` when the result does not fit `u64`.
pub fn checked_pair(a: u64, b: u64) -> Option<u64> {
    let s = a as u128 + b as u128;
    u64::try_from(s * (s + 1) / 2 + b as u128).ok()
}

/// Inverse of [`pair`]; total on `u64`.
pub fn unpair(k: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= k, found via integer sqrt then correction.
    let mut s = (((8 * k as u128 + 1).sqrt() - 1) / 2) as u64;
    while tri(s + 1) <= k as u128 {
        s += 1;
    }
    while tri(s) > k as u128 {
        s -= 1;
    }
    let b = k - tri(s) as u64;
    (s - b, b)
}

fn tri(s: u64) -> u128 {
    let s = s as u128;
    s * (s + 1) / 2
}

/// Cantor pairing on arbitrary naturals.
pub fn big_pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    &s * (&s + 1u32) / 2u32 + b
}

/// Inverse of [`big_pair`].
pub fn big_unpair(k: &BigUint) -> (BigUint, BigUint) {
    let disc = (k * 8u32 + 1u32).sqrt();
    let mut s = (disc - 1u32) / 2u32;
    let big_tri = |s: &BigUint| -> BigUint { s * (s + 1u32) / 2u32 };
    while big_tri(&(&s + 1u32)) <= *k {
        s += 1u32;
    }
    while big_tri(&s) > *k {
        s -= 1u32;
    }
    let b = k - big_tri(&s);
    let a = &s - &b;
    (a, b)
}

/// Zigzag code for signed integers: 0, 1, -1, 2, -2, ... maps to 0, 1, 2, 3, 4, ...
pub fn zigzag_encode(v: i64) -> u64 {
    if v >= 0 {
        2 * v as u64 - if v > 0 { 1 } else { 0 }
    } else {
        2 * (-v) as u64
    }
}

/// Inverse of [`zigzag_encode`].
pub fn zigzag_decode(n: u64) -> i64 {
    if n == 0 {
        0
    } else if n % 2 == 1 {
        ((n + 1) / 2) as i64
    } else {
        -((n / 2) as i64)
    }
}

/// Canonical code of a finite subset of `{0, ..., 63}`: the bitmask.
pub fn finite_set_code(set: &BTreeSet<u64>) -> Option<u64> {
    let mut code = 0u64;
    for &e in set {
        if e >= 64 {
            return None;
        }
        code |= 1 << e;
    }
    Some(code)
}

/// Inverse of [`finite_set_code`].
pub fn finite_set_decode(code: u64) -> BTreeSet<u64> {
    (0..64).filter(|i| code & (1 << i) != 0).collect()
}

/// Is the big natural small enough to use as a machine input?
pub fn to_u64(n: &BigUint) -> Option<u64> {
    let digits = n.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

pub fn big_is_zero(n: &BigUint) -> bool {
    n.is_zero()
}

pub fn big_one() -> BigUint {
    BigUint::one()
}
