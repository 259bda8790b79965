//! Algebraic cpos with decidable compact order, their Scott-topology base,
//! and suprema of directed enumerations via cofinal chains.

use super::{Enumeration, Space, SpaceError};
use crate::sigma::{Lifted, Semi};
use std::sync::{Arc, Mutex};

/// An omega-algebraic omega-cpo presented by its compact elements: a
/// countable decidable listing with a decidable order. Points are
/// enumerations of directed sets of compacts, identified with their suprema.
pub trait AlgebraicCpo: Clone + Send + Sync + 'static {
    type Compact: Clone + Eq + std::fmt::Debug + Send + Sync + 'static;

    /// The `index`-th compact element; `None` past the end of a finite
    /// listing.
    fn compact(&self, index: u64) -> Option<Self::Compact>;

    /// The decidable order on compacts.
    fn leq(&self, a: &Self::Compact, b: &Self::Compact) -> bool;
}

/// A point: an enumeration of compact indices whose sup it denotes.
#[derive(Debug, Clone)]
pub struct CpoPoint {
    indices: Enumeration,
}

impl CpoPoint {
    pub fn new(indices: Enumeration) -> Self {
        CpoPoint { indices }
    }

    pub fn indices(&self) -> &Enumeration {
        &self.indices
    }

    pub fn constant(index: u64) -> Self {
        CpoPoint::new(Enumeration::new(move |_| Some(index)))
    }

    /// `compact <= sup(point)`: semidecidable by scanning the enumeration.
    pub fn upset_member<C: AlgebraicCpo>(&self, cpo: &C, compact_index: u64) -> Semi {
        let indices = self.indices.clone();
        let cpo = cpo.clone();
        Semi::from_monotone_probe(move |f| {
            let Some(x) = cpo.compact(compact_index) else { return false };
            (0..=f).any(|n| {
                indices
                    .at(n)
                    .and_then(|ci| cpo.compact(ci))
                    .is_some_and(|c| cpo.leq(&x, &c))
            })
        })
    }
}

/// An algebraic cpo viewed as a countably based space: base index `i` is the
/// upset of the `i`-th compact.
#[derive(Debug, Clone)]
pub struct CpoSpace<C: AlgebraicCpo> {
    pub cpo: C,
}

impl<C: AlgebraicCpo> CpoSpace<C> {
    pub fn new(cpo: C) -> Self {
        CpoSpace { cpo }
    }
}

impl<C: AlgebraicCpo> Space for CpoSpace<C> {
    type Point = CpoPoint;

    fn base_member(&self, index: u64, point: &CpoPoint) -> Semi {
        point.upset_member(&self.cpo, index)
    }

    fn base_refine(&self, i: u64, j: u64, point: &CpoPoint) -> Lifted<u64> {
        // Scan the point's own enumeration for a compact above both; its
        // upset is contained in both upsets for every point.
        let cpo = self.cpo.clone();
        let indices = point.indices.clone();
        Lifted::from_stable_probe(move |f| {
            let a = cpo.compact(i)?;
            let b = cpo.compact(j)?;
            (0..=f).find_map(|n| {
                let ci = indices.at(n)?;
                let c = cpo.compact(ci)?;
                (cpo.leq(&a, &c) && cpo.leq(&b, &c)).then_some(ci)
            })
        })
    }
}

/// The supremum of a countable directed set, per the cofinal-chain
/// construction: positions `c_0 = 0`, `c_{n+1} = chooser(c_n, n)`, where the
/// chooser must return a position whose element bounds both arguments'
/// elements.
///
/// The first `check_depth` chain steps are validated eagerly; later steps
/// are validated as the returned point is consumed, and a late violation
/// freezes the enumeration into skips rather than emitting unsound elements.
pub fn cpo_sup<C: AlgebraicCpo>(
    cpo: &C,
    enumeration: impl Fn(u64) -> u64 + Send + Sync + 'static,
    chooser: impl Fn(u64, u64) -> u64 + Send + Sync + 'static,
    check_depth: u64,
) -> Result<CpoPoint, SpaceError> {
    struct Chain<C: AlgebraicCpo, E, S> {
        cpo: C,
        enumeration: E,
        chooser: S,
        positions: Vec<u64>,
        failed: bool,
    }

    impl<C: AlgebraicCpo, E: Fn(u64) -> u64, S: Fn(u64, u64) -> u64> Chain<C, E, S> {
        /// Extends the memoized chain to length `n + 1`; returns Err at the
        /// first invalid choice.
        fn extend_to(&mut self, n: u64) -> Result<(), SpaceError> {
            if self.positions.is_empty() {
                self.positions.push(0);
            }
            while self.positions.len() as u64 <= n {
                if self.failed {
                    return Err(SpaceError::NotDirected {
                        position: self.positions.len() as u64,
                    });
                }
                let step = self.positions.len() as u64 - 1;
                let prev = *self.positions.last().unwrap();
                let next = (self.chooser)(prev, step);
                let ok = (|| {
                    let bound = self.cpo.compact((self.enumeration)(next))?;
                    let a = self.cpo.compact((self.enumeration)(prev))?;
                    let b = self.cpo.compact((self.enumeration)(step))?;
                    Some(self.cpo.leq(&a, &bound) && self.cpo.leq(&b, &bound))
                })()
                .unwrap_or(false);
                if !ok {
                    self.failed = true;
                    return Err(SpaceError::NotDirected { position: step + 1 });
                }
                self.positions.push(next);
            }
            Ok(())
        }
    }

    let chain = Arc::new(Mutex::new(Chain {
        cpo: cpo.clone(),
        enumeration,
        chooser,
        positions: Vec::new(),
        failed: false,
    }));

    chain.lock().unwrap().extend_to(check_depth)?;

    let point_chain = chain.clone();
    Ok(CpoPoint::new(Enumeration::new(move |n| {
        let mut chain = point_chain.lock().unwrap();
        if chain.extend_to(n).is_err() {
            return None;
        }
        let pos = chain.positions[n as usize];
        Some((chain.enumeration)(pos))
    })))
}

/// The powerset of `{0, ..., width - 1}` ordered by inclusion; compacts are
/// the subsets themselves, listed by bitmask.
#[derive(Debug, Clone)]
pub struct FinitePowersetCpo {
    pub width: u32,
}

impl AlgebraicCpo for FinitePowersetCpo {
    type Compact = u64;

    fn compact(&self, index: u64) -> Option<u64> {
        (index < (1u64 << self.width)).then_some(index)
    }

    fn leq(&self, a: &u64, b: &u64) -> bool {
        a & !b == 0
    }
}

impl FinitePowersetCpo {
    pub fn all_points(&self) -> impl Iterator<Item = u64> {
        0..(1u64 << self.width)
    }
}

/// The Scott domain of enumerations as a cpo: compacts are the bitmask-coded
/// finite subsets of the naturals below 64, ordered by inclusion.
#[derive(Debug, Clone, Default)]
pub struct SigmaNCpo;

impl AlgebraicCpo for SigmaNCpo {
    type Compact = u64;

    fn compact(&self, index: u64) -> Option<u64> {
        Some(index)
    }

    fn leq(&self, a: &u64, b: &u64) -> bool {
        a & !b == 0
    }
}

/// The union of all bits enumerated by a point within `steps`, for tests and
/// brute-force comparisons on finite cpos.
pub fn union_of_masks<C: AlgebraicCpo<Compact = u64>>(cpo: &C, point: &CpoPoint, steps: u64) -> u64 {
    let mut acc = 0u64;
    for n in 0..steps {
        if let Some(ci) = point.indices().at(n) {
            if let Some(mask) = cpo.compact(ci) {
                acc |= mask;
            }
        }
    }
    acc
}
