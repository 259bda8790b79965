//! Cantor and Baire space: streams with prefix basic opens.
//!
//! For Cantor space, a base index codes a finite bit string via the binary
//! expansion of `index + 1` with the leading 1 removed; membership of a
//! stream is decided exactly at fuel equal to the prefix length. Baire space
//! codes finite sequences of naturals by the pairing-based list code.

use super::{Enumeration, Space};
use crate::nat::{checked_pair, unpair};
use crate::sigma::{Lifted, Semi};
use std::sync::Arc;

/// Code of a finite bit string: binary of `code + 1` without its leading 1.
pub fn prefix_decode(code: u64) -> Vec<bool> {
    let n = code + 1;
    let bits = 64 - n.leading_zeros();
    (0..bits.saturating_sub(1)).rev().map(|i| n & (1 << i) != 0).collect()
}

/// Inverse of [`prefix_decode`]; defined for strings of length below 64.
pub fn prefix_encode(prefix: &[bool]) -> Option<u64> {
    if prefix.len() >= 64 {
        return None;
    }
    let mut n: u64 = 1;
    for &b in prefix {
        n = (n << 1) | b as u64;
    }
    Some(n - 1)
}

/// A stream valued in `V`, shared and memoizable by cloning.
#[derive(Clone)]
pub struct GenericSequence<V> {
    f: Arc<dyn Fn(u64) -> V + Send + Sync>,
}

impl<V: Clone + Send + Sync + 'static> GenericSequence<V> {
    pub fn from_fn(f: impl Fn(u64) -> V + Send + Sync + 'static) -> Self {
        GenericSequence { f: Arc::new(f) }
    }

    /// A finite prefix followed by a constant tail.
    pub fn eventually_constant(prefix: Vec<V>, tail: V) -> Self {
        GenericSequence::from_fn(move |n| {
            prefix.get(n as usize).cloned().unwrap_or_else(|| tail.clone())
        })
    }

    pub fn at(&self, n: u64) -> V {
        (self.f)(n)
    }
}

impl<V> std::fmt::Debug for GenericSequence<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Sequence(..)")
    }
}

/// A point of Cantor space: a total binary stream.
pub type CantorPoint = GenericSequence<bool>;

impl CantorPoint {
    pub fn zeros() -> Self {
        CantorPoint::from_fn(|_| false)
    }

    pub fn extends(&self, prefix: &[bool]) -> bool {
        prefix.iter().enumerate().all(|(k, &b)| self.at(k as u64) == b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CantorSpace;

impl Space for CantorSpace {
    type Point = CantorPoint;

    fn base_member(&self, index: u64, point: &CantorPoint) -> Semi {
        let prefix = prefix_decode(index);
        let point = point.clone();
        // Decided exactly at fuel = prefix length.
        Semi::from_monotone_probe(move |f| f >= prefix.len() as u64 && point.extends(&prefix))
    }

    fn base_refine(&self, i: u64, j: u64, point: &CantorPoint) -> Lifted<u64> {
        let a = prefix_decode(i);
        let b = prefix_decode(j);
        let (longer, longer_code) = if a.len() >= b.len() { (a.clone(), i) } else { (b.clone(), j) };
        let (shorter, _) = if a.len() >= b.len() { (b, j) } else { (a, i) };
        let compatible = longer.starts_with(&shorter);
        let point = point.clone();
        Lifted::from_stable_probe(move |f| {
            (compatible && f >= longer.len() as u64 && point.extends(&longer)).then_some(longer_code)
        })
    }

    fn nbh_enumerate(&self, point: &CantorPoint) -> Enumeration {
        // The accepting indices are exactly the codes of the point's
        // prefixes, one per length; lengths 64 and beyond have no code.
        let point = point.clone();
        Enumeration::new(move |n| {
            let prefix: Vec<bool> = (0..n).map(|k| point.at(k)).collect();
            prefix_encode(&prefix)
        })
    }
}

/// Code of a finite sequence of naturals: nil is 0, cons is `pair + 1`.
pub fn sequence_decode(code: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = code;
    while rest > 0 {
        let (head, tail) = unpair(rest - 1);
        out.push(head);
        rest = tail;
    }
    out
}

pub fn sequence_encode(seq: &[u64]) -> Option<u64> {
    let mut code: u64 = 0;
    for &v in seq.iter().rev() {
        code = checked_pair(v, code)?.checked_add(1)?;
    }
    Some(code)
}

/// A point of Baire space: a total stream of naturals.
pub type BairePoint = GenericSequence<u64>;

#[derive(Debug, Clone, Default)]
pub struct BaireSpace;

impl Space for BaireSpace {
    type Point = BairePoint;

    fn base_member(&self, index: u64, point: &BairePoint) -> Semi {
        let prefix = sequence_decode(index);
        let point = point.clone();
        Semi::from_monotone_probe(move |f| {
            f >= prefix.len() as u64
                && prefix.iter().enumerate().all(|(k, &v)| point.at(k as u64) == v)
        })
    }

    fn base_refine(&self, i: u64, j: u64, point: &BairePoint) -> Lifted<u64> {
        let a = sequence_decode(i);
        let b = sequence_decode(j);
        let (longer, longer_code) = if a.len() >= b.len() { (a.clone(), i) } else { (b.clone(), j) };
        let (shorter, _) = if a.len() >= b.len() { (b, j) } else { (a, i) };
        let compatible = longer.starts_with(&shorter);
        let point = point.clone();
        Lifted::from_stable_probe(move |f| {
            (compatible
                && f >= longer.len() as u64
                && longer.iter().enumerate().all(|(k, &v)| point.at(k as u64) == v))
            .then_some(longer_code)
        })
    }

    fn nbh_enumerate(&self, point: &BairePoint) -> Enumeration {
        let point = point.clone();
        Enumeration::new(move |n| {
            let prefix: Vec<u64> = (0..n).map(|k| point.at(k)).collect();
            sequence_encode(&prefix)
        })
    }
}
