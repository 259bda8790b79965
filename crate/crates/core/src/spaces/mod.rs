//! Countably based represented spaces.
//!
//! A space fixes a representation of points and a countable family of basic
//! opens, each given as a fuel-indexed membership semidecider. The basic
//! neighborhood filter of a point — the enumeration of the base indices
//! whose basic open contains it — is the universal embedding into the Scott
//! domain of enumerations, and is the input format for everything in
//! [`crate::engine`], [`crate::sober`] and [`crate::klst`].

mod cantor;
mod cpo;
mod literal;
mod real;
mod scott;

pub use cantor::{
    prefix_decode, prefix_encode, sequence_decode, sequence_encode, BairePoint, BaireSpace,
    CantorPoint, CantorSpace, GenericSequence,
};
pub use cpo::{
    cpo_sup, union_of_masks, AlgebraicCpo, CpoPoint, CpoSpace, FinitePowersetCpo, SigmaNCpo,
};
pub use literal::{
    parse_cantor_point, parse_index_set, parse_rational, parse_scott_point, LiteralError,
};
pub use real::{
    ball_member, decode_ball, dense_point, dense_point_index, encode_ball, DyadicReal, DyadicSpace,
};
pub use scott::{ScottPoint, ScottSpace};

use crate::sigma::{Lifted, Semi};
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// An enumeration of a subset of the naturals: a total function that may
/// skip. The enumerated set is the collection of non-skip outputs.
#[derive(Clone)]
pub struct Enumeration(Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>);

impl Enumeration {
    pub fn new(f: impl Fn(u64) -> Option<u64> + Send + Sync + 'static) -> Self {
        Enumeration(Arc::new(f))
    }

    pub fn at(&self, position: u64) -> Option<u64> {
        (self.0)(position)
    }

    /// The identity enumeration of all naturals.
    pub fn all_naturals() -> Self {
        Enumeration::new(Some)
    }

    pub fn empty() -> Self {
        Enumeration::new(|_| None)
    }

    pub fn from_set(set: BTreeSet<u64>) -> Self {
        let items: Vec<u64> = set.into_iter().collect();
        Enumeration::new(move |n| items.get(n as usize).copied())
    }

    /// The set of values emitted at positions `0..steps`.
    pub fn observed(&self, steps: u64) -> BTreeSet<u64> {
        (0..steps).filter_map(|n| self.at(n)).collect()
    }
}

impl std::fmt::Debug for Enumeration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Enumeration(..)")
    }
}

/// A countably based represented space.
pub trait Space: Clone + Send + Sync + 'static {
    type Point: Clone + Send + Sync + 'static;

    /// The membership semidecider of the `index`-th basic open.
    fn base_member(&self, index: u64, point: &Self::Point) -> Semi;

    /// For a point in both `B_i` and `B_j`, a basic index `k` with the point
    /// in `B_k` and `B_k` entailing membership in both: the pointwise-base
    /// law. Pending forever when the point is not in the intersection.
    fn base_refine(&self, i: u64, j: u64, point: &Self::Point) -> Lifted<u64>;

    /// Enumerates exactly the base indices whose basic open contains the
    /// point. The default dovetails `base_member` over `(index, fuel)` on
    /// the pairing schedule; instances override it with sharper orders.
    fn nbh_enumerate(&self, point: &Self::Point) -> Enumeration {
        dovetail_neighborhoods(self.clone(), point.clone())
    }
}

/// The generic neighborhood enumeration: position `pair(i, f)` emits `i`
/// exactly when the `i`-th basic open accepts the point at fuel `f`.
pub fn dovetail_neighborhoods<S: Space>(space: S, point: S::Point) -> Enumeration {
    let memo: Mutex<HashMap<u64, Semi>> = Mutex::new(HashMap::new());
    Enumeration::new(move |n| {
        let (i, f) = crate::nat::unpair(n);
        let semi = {
            let mut memo = memo.lock().unwrap();
            memo.entry(i).or_insert_with(|| space.base_member(i, &point)).clone()
        };
        if semi.probe(f) {
            Some(i)
        } else {
            None
        }
    })
}

/// The basic neighborhood filter of a point, as a point of the Scott domain.
pub fn nbh<S: Space>(space: &S, point: &S::Point) -> ScottPoint {
    ScottPoint::new(space.nbh_enumerate(point))
}

/// The universal embedding of a countably based T0 space into the Scott
/// domain of enumerations; shares its implementation with [`nbh`], and is
/// injective exactly when the space is T0.
pub fn embed<S: Space>(space: &S, point: &S::Point) -> ScottPoint {
    nbh(space, point)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("chooser failed to produce an upper bound at chain position {position}")]
    NotDirected { position: u64 },
    #[error(transparent)]
    DegenerateBall(#[from] crate::dyadic::DegenerateBall),
}
