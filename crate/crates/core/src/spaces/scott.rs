//! The Scott domain of enumerations: points are enumerations of subsets of
//! the naturals, and a basic open is "this finite set has been enumerated".
//!
//! Base indices are the canonical finite-set codes (bitmasks), so the coded
//! base surface covers finite sets with elements below 64; the structured
//! APIs in [`crate::engine`] take finite sets directly and have no such
//! bound.

use super::{Enumeration, Space};
use crate::nat::{finite_set_decode, unpair};
use crate::sigma::{Lifted, OmegaBar, Semi};
use std::collections::BTreeSet;

/// A point of the Scott domain: an enumeration, understood as the set of
/// its non-skip outputs.
#[derive(Debug, Clone)]
pub struct ScottPoint {
    items: Enumeration,
}

impl ScottPoint {
    pub fn new(items: Enumeration) -> Self {
        ScottPoint { items }
    }

    pub fn items(&self) -> &Enumeration {
        &self.items
    }

    /// The identity enumeration of all naturals.
    pub fn all_naturals() -> Self {
        ScottPoint::new(Enumeration::all_naturals())
    }

    pub fn empty() -> Self {
        ScottPoint::new(Enumeration::empty())
    }

    pub fn from_set(set: BTreeSet<u64>) -> Self {
        ScottPoint::new(Enumeration::from_set(set))
    }

    pub fn evens() -> Self {
        ScottPoint::new(Enumeration::new(|n| n.checked_mul(2)))
    }

    pub fn primes() -> Self {
        ScottPoint::new(Enumeration::new(|n| {
            let mut count = 0u64;
            let mut candidate = 1u64;
            loop {
                candidate = candidate.checked_add(1)?;
                if is_prime(candidate) {
                    if count == n {
                        return Some(candidate);
                    }
                    count += 1;
                }
            }
        }))
    }

    /// The set `{k : k < t}` for an element of the compactified naturals:
    /// the canonical embedding used by waiting-argument searches. At the
    /// point at infinity this is the identity enumeration.
    pub fn below_omega(t: &OmegaBar) -> Self {
        let t = t.clone();
        ScottPoint::new(Enumeration::new(move |n| t.bit(n).then_some(n)))
    }

    /// Membership of the basic open `{S : finite_set ⊆ S}`, with fuel
    /// counted in enumeration steps consumed.
    pub fn upset_member(&self, finite_set: &BTreeSet<u64>) -> Semi {
        let items = self.items.clone();
        let finite_set = finite_set.clone();
        Semi::from_monotone_probe(move |f| {
            let mut missing = finite_set.clone();
            for n in 0..f {
                if let Some(v) = items.at(n) {
                    missing.remove(&v);
                }
                if missing.is_empty() {
                    return true;
                }
            }
            missing.is_empty()
        })
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The Scott domain as a countably based space over bitmask-coded finite
/// sets.
#[derive(Debug, Clone, Default)]
pub struct ScottSpace;

impl Space for ScottSpace {
    type Point = ScottPoint;

    fn base_member(&self, index: u64, point: &ScottPoint) -> Semi {
        point.upset_member(&finite_set_decode(index))
    }

    fn base_refine(&self, i: u64, j: u64, point: &ScottPoint) -> Lifted<u64> {
        // The union code refines exactly: membership in the union upset is
        // membership in both, for every point.
        let k = i | j;
        let member = self.base_member(k, point);
        Lifted::from_stable_probe(move |f| member.probe(f).then_some(k))
    }

    fn nbh_enumerate(&self, point: &ScottPoint) -> Enumeration {
        // Position pair(t, mask) emits mask exactly when everything in the
        // mask has been enumerated within t steps; every accepting mask
        // appears once t covers it.
        let items = point.items.clone();
        Enumeration::new(move |n| {
            let (t, mask) = unpair(n);
            let mut observed = 0u64;
            for s in 0..t {
                if let Some(v) = items.at(s) {
                    if v < 64 {
                        observed |= 1 << v;
                    }
                }
            }
            (mask & !observed == 0).then_some(mask)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat::finite_set_code;
    use crate::spaces::nbh;

    #[test]
    fn upset_membership_counts_consumed_steps() {
        let evens = ScottPoint::evens();
        let want: BTreeSet<u64> = [2, 4].into_iter().collect();
        let s = evens.upset_member(&want);
        // 4 appears at position 2, so three steps are needed.
        assert!(!s.probe(2));
        assert!(s.probe(3));
        let odd: BTreeSet<u64> = [1].into_iter().collect();
        assert!(!evens.upset_member(&odd).probe(5_000));
        // The empty requirement accepts at fuel 0.
        assert!(evens.upset_member(&BTreeSet::new()).probe(0));
    }

    #[test]
    fn nbh_of_evens_contains_two_four_but_not_one() {
        let filter = nbh(&ScottSpace, &ScottPoint::evens());
        let good = finite_set_code(&[2u64, 4].into_iter().collect()).unwrap();
        let bad = finite_set_code(&[1u64].into_iter().collect()).unwrap();
        let seen = filter.items().observed(100_000);
        assert!(seen.contains(&good));
        assert!(!seen.contains(&bad));
    }

    #[test]
    fn below_omega_embeds_the_compactified_naturals() {
        let four = ScottPoint::below_omega(&OmegaBar::finite(4));
        assert_eq!(four.items().observed(100), [0u64, 1, 2, 3].into_iter().collect());
        let inf = ScottPoint::below_omega(&OmegaBar::infinity());
        assert_eq!(inf.items().observed(5), (0..5).collect::<BTreeSet<u64>>());
    }

    #[test]
    fn primes_enumeration() {
        let p = ScottPoint::primes();
        let first: Vec<u64> = (0..5).filter_map(|n| p.items().at(n)).collect();
        assert_eq!(first, vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn refine_is_the_union_mask() {
        let x = ScottPoint::all_naturals();
        let i = finite_set_code(&[1u64, 2].into_iter().collect()).unwrap();
        let j = finite_set_code(&[2u64, 5].into_iter().collect()).unwrap();
        let k = ScottSpace.base_refine(i, j, &x).probe(10).unwrap();
        assert_eq!(finite_set_decode(k), [1u64, 2, 5].into_iter().collect());
    }
}
