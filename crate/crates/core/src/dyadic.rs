//! Exact dyadic rational arithmetic, intervals, and formal balls.
//!
//! Every real-number computation in this crate bottoms out here: all
//! comparisons are exact integer comparisons, never floating point.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// An exact dyadic rational `mantissa * 2^exponent`, normalized so the
/// mantissa is odd (or zero with exponent zero).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Dyadic::new(BigInt::from(1), 0)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// `2^e` for any integer `e` (negative gives fractions).
    pub fn pow2(e: i64) -> Self {
        Dyadic::new(BigInt::from(1), e)
    }

    /// `numerator / 2^k`.
    pub fn from_fraction_pow2(numerator: i64, k: u32) -> Self {
        Dyadic::new(BigInt::from(numerator), -(k as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.sign() == Sign::Plus
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn half(&self) -> Self {
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent - 1 }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.mantissa.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Align two dyadics to a common exponent and return the mantissas.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        (a, b, e)
    }

    /// Largest multiple of `2^-precision` that is `<= self / divisor`.
    pub fn div_floor(&self, divisor: u32, precision: u32) -> Self {
        let shift = self.exponent + precision as i64;
        let scaled = if shift >= 0 {
            &self.mantissa << shift as u64
        } else {
            // Dividing by 2^-shift first loses information; fold it into the divisor.
            return Dyadic::new(
                self.mantissa.div_floor(&(BigInt::from(divisor) << (-shift) as u64)),
                -(precision as i64),
            );
        };
        Dyadic::new(scaled.div_floor(&BigInt::from(divisor)), -(precision as i64))
    }

    /// Smallest multiple of `2^-precision` that is `>= self / divisor`.
    pub fn div_ceil(&self, divisor: u32, precision: u32) -> Self {
        let shift = self.exponent + precision as i64;
        let scaled = if shift >= 0 {
            &self.mantissa << shift as u64
        } else {
            return Dyadic::new(
                self.mantissa.div_ceil(&(BigInt::from(divisor) << (-shift) as u64)),
                -(precision as i64),
            );
        };
        Dyadic::new(scaled.div_ceil(&BigInt::from(divisor)), -(precision as i64))
    }

    /// Round to the nearest multiple of `2^-precision` (ties upward).
    pub fn round_to(&self, precision: u32) -> Self {
        let twice = self.mul_pow2(precision as i64 + 1);
        let m: BigInt = twice.floor_int() + 1;
        let half_up = m.div_floor(&BigInt::from(2));
        Dyadic::new(half_up, -(precision as i64))
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            self.mantissa.div_floor(&(BigInt::from(1) << (-self.exponent) as u64))
        }
    }

    /// The numerator when written over denominator `2^k`, `k = max(0, -exponent)`.
    pub fn numerator_at_scale(&self, k: u32) -> BigInt {
        let shift = self.exponent + k as i64;
        assert!(shift >= 0, "scale too coarse for exact numerator");
        &self.mantissa << shift as u64
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa.clone(), exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    /// Exact rational rendering: an integer, or `p/q` with `q` a power of two.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.mantissa << self.exponent as u64)
        } else {
            let q = BigUint::from(1u32) << (-self.exponent) as u64;
            write!(f, "{}/{}", self.mantissa, q)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DyadicParseError {
    #[error("empty dyadic literal")]
    Empty,
    #[error("invalid integer in dyadic literal: {0}")]
    BadInt(String),
    #[error("denominator must be a positive power of two, got {0}")]
    NotPowerOfTwo(String),
}

impl FromStr for Dyadic {
    type Err = DyadicParseError;

    /// Parses `p` or `p/q` with `q` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(DyadicParseError::Empty);
        }
        match s.split_once('/') {
            None => {
                let m = BigInt::from_str(s).map_err(|_| DyadicParseError::BadInt(s.into()))?;
                Ok(Dyadic::new(m, 0))
            }
            Some((p, q)) => {
                let num =
                    BigInt::from_str(p.trim()).map_err(|_| DyadicParseError::BadInt(p.into()))?;
                let den = BigUint::from_str(q.trim())
                    .map_err(|_| DyadicParseError::BadInt(q.into()))?;
                if den.is_zero() || (den.count_ones() != 1) {
                    return Err(DyadicParseError::NotPowerOfTwo(q.trim().into()));
                }
                let k = den.trailing_zeros().unwrap_or(0) as i64;
                Ok(Dyadic::new(num, -k))
            }
        }
    }
}

impl TryFrom<String> for Dyadic {
    type Error = DyadicParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Dyadic> for String {
    fn from(d: Dyadic) -> String {
        d.to_string()
    }
}

/// A closed dyadic interval `[lo, hi]`, the workhorse of exact expression
/// evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).half()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().cloned().min().unwrap();
        let hi = products.iter().cloned().max().unwrap();
        Interval::new(lo, hi)
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval::new(Dyadic::zero(), self.lo.abs().max(self.hi.abs()))
        }
    }

    /// Pointwise minimum hull: min is monotone in both arguments.
    pub fn min(&self, rhs: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(rhs.lo.clone()),
            self.hi.clone().min(rhs.hi.clone()),
        )
    }

    pub fn max(&self, rhs: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().max(rhs.lo.clone()),
            self.hi.clone().max(rhs.hi.clone()),
        )
    }
}

/// A formal open ball with exact dyadic center and radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Dyadic,
    pub radius: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ball radius must be strictly positive, got {0}")]
pub struct DegenerateBall(pub String);

impl Ball {
    /// Degenerate radii are rejected: empty and point balls only add noise to
    /// refinement searches.
    pub fn new(center: Dyadic, radius: Dyadic) -> Result<Self, DegenerateBall> {
        if !radius.is_positive() {
            return Err(DegenerateBall(radius.to_string()));
        }
        Ok(Ball { center, radius })
    }
}

/// Formal strict inclusion: `|c1 - c2| + r1 < r2`, which soundly implies the
/// set inclusion of the corresponding open balls.
pub fn formal_ball_inclusion(inner: &Ball, outer: &Ball) -> bool {
    &(&inner.center - &outer.center).abs() + &inner.radius < outer.radius
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: i64, k: u32) -> Dyadic {
        Dyadic::from_fraction_pow2(n, k)
    }

    #[test]
    fn display_round_trip() {
        for (txt, val) in [("3/4", d(3, 2)), ("-5/8", d(-5, 3)), ("7", d(7, 0)), ("0", d(0, 0))] {
            assert_eq!(txt.parse::<Dyadic>().unwrap(), val);
            assert_eq!(val.to_string().parse::<Dyadic>().unwrap(), val);
        }
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("1/0".parse::<Dyadic>().is_err());
    }

    #[test]
    fn div_floor_by_three() {
        // 1/3 rounded down at precision 4 is 5/16.
        assert_eq!(Dyadic::one().div_floor(3, 4), d(5, 4));
        // And the ceiling is 6/16 = 3/8.
        assert_eq!(Dyadic::one().div_ceil(3, 4), d(6, 4));
        // Negative values floor away from zero.
        assert_eq!(Dyadic::from_int(-1).div_floor(3, 4), d(-6, 4));
    }

    #[test]
    fn formal_inclusion_examples() {
        let b = |c: Dyadic, r: Dyadic| Ball::new(c, r).unwrap();
        assert!(formal_ball_inclusion(
            &b(Dyadic::zero(), d(1, 2)),
            &b(Dyadic::zero(), d(1, 1))
        ));
        // 1/4 + 1/4 = 1/2 is not < 1/2.
        assert!(!formal_ball_inclusion(
            &b(d(1, 2), d(1, 2)),
            &b(Dyadic::zero(), d(1, 1))
        ));
        assert!(formal_ball_inclusion(
            &b(d(1, 3), d(1, 3)),
            &b(Dyadic::zero(), d(1, 1))
        ));
    }

    #[test]
    fn degenerate_ball_rejected() {
        assert!(Ball::new(Dyadic::zero(), Dyadic::zero()).is_err());
        assert!(Ball::new(Dyadic::zero(), d(-1, 1)).is_err());
    }

    proptest! {
        #[test]
        fn arithmetic_matches_i128(a in -10_000i64..10_000, b in -10_000i64..10_000,
                                   ka in 0u32..6, kb in 0u32..6) {
            let x = d(a, ka);
            let y = d(b, kb);
            // Compare against exact arithmetic over a common denominator 2^(ka+kb).
            let ax = (a as i128) << kb;
            let by = (b as i128) << ka;
            let sum = &x + &y;
            prop_assert_eq!(sum, Dyadic::new(BigInt::from(ax + by), -((ka + kb) as i64)));
            let prod = &x * &y;
            prop_assert_eq!(prod, Dyadic::new(BigInt::from(a as i128 * b as i128), -((ka + kb) as i64)));
            prop_assert_eq!(x.cmp(&y), (ax).cmp(&by));
        }

        #[test]
        fn interval_mul_contains_products(a in -100i64..100, b in -100i64..100,
                                          c in -100i64..100, e in -100i64..100) {
            let i1 = Interval::new(d(a.min(b), 3), d(a.max(b), 3));
            let i2 = Interval::new(d(c.min(e), 3), d(c.max(e), 3));
            let m = i1.mul(&i2);
            for p in [&i1.lo * &i2.lo, &i1.lo * &i2.hi, &i1.hi * &i2.lo, &i1.hi * &i2.hi] {
                prop_assert!(m.contains(&p));
            }
        }
    }
}
