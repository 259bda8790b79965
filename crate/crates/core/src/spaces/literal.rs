//! Textual point literals used by the CLI.
//!
//! - Cantor points: `bits:00101` for a finite prefix padded with zeros, or
//!   `bits:001(1)*` for an eventually constant tail;
//! - reals: exact rationals `p/q` (dyadic denominators are represented
//!   exactly, others through their rounded fast Cauchy sequence);
//! - Scott points: `{2,4,6}`, or the built-ins `evens` and `primes`.

use super::cantor::CantorPoint;
use super::real::DyadicReal;
use super::scott::ScottPoint;
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct LiteralError(pub String);

fn err(msg: impl Into<String>) -> LiteralError {
    LiteralError(msg.into())
}

/// Parses `bits:...` with digits 0/1 and an optional `(0)*` / `(1)*` tail.
pub fn parse_cantor_point(text: &str) -> Result<CantorPoint, LiteralError> {
    let body = text
        .trim()
        .strip_prefix("bits:")
        .ok_or_else(|| err("cantor literal must start with `bits:`"))?;
    let (digits, tail) = if let Some(prefix) = body.strip_suffix("(0)*") {
        (prefix, false)
    } else if let Some(prefix) = body.strip_suffix("(1)*") {
        (prefix, true)
    } else {
        (body, false)
    };
    let mut bits = Vec::with_capacity(digits.len());
    for (i, c) in digits.chars().enumerate() {
        match c {
            '0' => bits.push(false),
            '1' => bits.push(true),
            other => return Err(err(format!("invalid bit `{other}` at position {i}"))),
        }
    }
    Ok(CantorPoint::eventually_constant(bits, tail))
}

/// Parses an exact rational `p` or `p/q` into a represented real.
pub fn parse_rational(text: &str) -> Result<DyadicReal, LiteralError> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        None => (text, "1"),
        Some((p, q)) => (p, q),
    };
    let num = BigInt::from_str(p.trim()).map_err(|_| err(format!("invalid numerator `{p}`")))?;
    let den = BigInt::from_str(q.trim()).map_err(|_| err(format!("invalid denominator `{q}`")))?;
    DyadicReal::from_fraction(num, den).ok_or_else(|| err("denominator must be nonzero"))
}

/// Parses `{2,4,6}`, `evens`, or `primes`.
pub fn parse_scott_point(text: &str) -> Result<ScottPoint, LiteralError> {
    let text = text.trim();
    match text {
        "evens" => return Ok(ScottPoint::evens()),
        "primes" => return Ok(ScottPoint::primes()),
        "naturals" => return Ok(ScottPoint::all_naturals()),
        _ => {}
    }
    let inner = text
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(format!("expected `{{..}}`, `evens` or `primes`, got `{text}`")))?;
    let mut set = BTreeSet::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let n: u64 = part.parse().map_err(|_| err(format!("invalid natural `{part}`")))?;
        set.insert(n);
    }
    Ok(ScottPoint::from_set(set))
}

/// Parses a finite index set `{2,5}`.
pub fn parse_index_set(text: &str) -> Result<BTreeSet<u64>, LiteralError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(format!("expected `{{..}}`, got `{text}`")))?;
    let mut set = BTreeSet::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        set.insert(part.parse::<u64>().map_err(|_| err(format!("invalid natural `{part}`")))?);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    #[test]
    fn cantor_literals() {
        let p = parse_cantor_point("bits:001(0)*").unwrap();
        assert!(!p.at(0) && !p.at(1) && p.at(2) && !p.at(3));
        let q = parse_cantor_point("bits:01(1)*").unwrap();
        assert!(q.at(5));
        assert!(parse_cantor_point("bits:012").is_err());
        assert!(parse_cantor_point("0101").is_err());
    }

    #[test]
    fn rational_literals() {
        let x = parse_rational("-5/8").unwrap();
        assert_eq!(x.approx(10), Dyadic::from_fraction_pow2(-5, 3));
        let third = parse_rational("1/3").unwrap();
        let a = third.approx(8);
        let diff = (&a - &Dyadic::from_fraction_pow2(85, 8)).abs();
        assert!(diff <= Dyadic::pow2(-8));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn scott_literals() {
        let s = parse_scott_point("{2, 4, 6}").unwrap();
        assert_eq!(s.items().observed(10), [2u64, 4, 6].into_iter().collect());
        assert!(parse_scott_point("evens").is_ok());
        assert!(parse_scott_point("odds").is_err());
    }
}
