//! Fuel-indexed semidecidable truth values, lifted partial values, and the
//! compactified naturals.
//!
//! A [`Semi`] is a monotone boolean process: once it accepts at some fuel it
//! accepts at every larger fuel. Truth is "accepts at some fuel"; falsity is
//! never observable, only bounded failure to accept. Every search in the
//! crate that may run forever is therefore cut off by an explicit budget,
//! and exhausting the budget is a first-class outcome, never a claim that
//! the answer is no.

use crate::nat::unpair;
use std::sync::{Arc, Mutex};

type Probe = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// A semidecidable truth value, represented by a total monotone probe
/// `fuel -> bool`.
///
/// Monotonicity is a contract on the supplied probe; every combinator here
/// preserves it. A cache of the least fuel seen to accept keeps repeated
/// probing cheap, which is sound only because of monotonicity.
#[derive(Clone)]
pub struct Semi {
    probe: Probe,
    first_accept: Arc<Mutex<Option<u64>>>,
}

impl Semi {
    /// Wraps a raw probe. The caller promises monotonicity in fuel.
    pub fn from_monotone_probe(probe: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Semi { probe: Arc::new(probe), first_accept: Arc::new(Mutex::new(None)) }
    }

    /// Accepts at fuel 0.
    pub fn top() -> Self {
        Semi::from_monotone_probe(|_| true)
    }

    /// Never accepts.
    pub fn bot() -> Self {
        Semi::from_monotone_probe(|_| false)
    }

    /// Accepts exactly at fuels `>= threshold`.
    pub fn after(threshold: u64) -> Self {
        Semi::from_monotone_probe(move |f| f >= threshold)
    }

    pub fn probe(&self, fuel: u64) -> bool {
        {
            let cache = self.first_accept.lock().unwrap();
            if let Some(t) = *cache {
                if fuel >= t {
                    return true;
                }
            }
        }
        let verdict = (self.probe)(fuel);
        if verdict {
            let mut cache = self.first_accept.lock().unwrap();
            match *cache {
                Some(t) if t <= fuel => {}
                _ => *cache = Some(fuel),
            }
        }
        verdict
    }

    /// Finite meet: accepts at `f` iff both accept at `f`.
    pub fn and(&self, other: &Semi) -> Semi {
        let a = self.clone();
        let b = other.clone();
        Semi::from_monotone_probe(move |f| a.probe(f) && b.probe(f))
    }

    /// Finite join: accepts at `f` iff either accepts at `f`.
    pub fn or(&self, other: &Semi) -> Semi {
        let a = self.clone();
        let b = other.clone();
        Semi::from_monotone_probe(move |f| a.probe(f) || b.probe(f))
    }

    /// Countable join, dovetailed on the pairing schedule: accepts at fuel
    /// `f` iff `seq(i)` accepts at fuel `g` for some `pair(i, g) <= f`.
    pub fn join(seq: impl Fn(u64) -> Semi + Send + Sync + 'static) -> Semi {
        let memo: Mutex<Vec<Semi>> = Mutex::new(Vec::new());
        Semi::from_monotone_probe(move |f| {
            for k in 0..=f {
                let (i, g) = unpair(k);
                let s = {
                    let mut memo = memo.lock().unwrap();
                    while memo.len() <= i as usize {
                        let next = memo.len() as u64;
                        memo.push(seq(next));
                    }
                    memo[i as usize].clone()
                };
                if s.probe(g) {
                    return true;
                }
            }
            false
        })
    }
}

impl std::fmt::Debug for Semi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Semi(..)")
    }
}

/// Outcome of a budgeted search for an accepting fuel.
///
/// `BudgetExhausted` is a value, not a fault: it never claims the underlying
/// truth value is false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovOutcome {
    Accepted { fuel: u64 },
    BudgetExhausted,
}

/// Searches for the least accepting fuel `<= budget`.
///
/// Monotonicity licenses a doubling scan followed by binary search, which
/// returns exactly what a linear scan of the probe would.
pub fn markov_run(s: &Semi, budget: u64) -> MarkovOutcome {
    if s.probe(0) {
        return MarkovOutcome::Accepted { fuel: 0 };
    }
    // Invariant: probe(lo) is false, and if hi is Some then probe(hi) is true.
    let mut lo = 0u64;
    let mut hi: Option<u64> = None;
    let mut step = 1u64;
    while hi.is_none() {
        let candidate = lo.saturating_add(step).min(budget);
        if s.probe(candidate) {
            hi = Some(candidate);
        } else {
            if candidate == budget {
                return MarkovOutcome::BudgetExhausted;
            }
            lo = candidate;
            step = step.saturating_mul(2);
        }
    }
    let mut hi = hi.unwrap();
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if s.probe(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    MarkovOutcome::Accepted { fuel: hi }
}

type LiftedProbe<V> = Arc<dyn Fn(u64) -> Option<V> + Send + Sync>;

/// A partial value that may become defined at some fuel and is then stable:
/// once a value appears it persists and never changes.
#[derive(Clone)]
pub struct Lifted<V> {
    probe: LiftedProbe<V>,
}

impl<V: Clone + Send + Sync + 'static> Lifted<V> {
    /// Wraps a raw probe. The caller promises monotone, stable behavior.
    pub fn from_stable_probe(probe: impl Fn(u64) -> Option<V> + Send + Sync + 'static) -> Self {
        Lifted { probe: Arc::new(probe) }
    }

    /// Defined from fuel 0 onward.
    pub fn resolved(v: V) -> Self {
        Lifted::from_stable_probe(move |_| Some(v.clone()))
    }

    /// Never defined.
    pub fn pending() -> Self {
        Lifted::from_stable_probe(|_| None)
    }

    pub fn probe(&self, fuel: u64) -> Option<V> {
        (self.probe)(fuel)
    }

    /// The support of the partial value, as a semidecidable truth value.
    pub fn is_defined(&self) -> Semi {
        let p = self.probe.clone();
        Semi::from_monotone_probe(move |f| p(f).is_some())
    }
}

impl<V> std::fmt::Debug for Lifted<V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lifted(..)")
    }
}

/// Extracts a witness from a family of semidecidable values: the resulting
/// partial natural resolves to the `n` minimizing `pair(n, fuel)` over all
/// accepting pairs, which fixes the witness once and for all.
///
/// The existence evidence required by the mathematical statement is derived
/// internally as the dovetailed join of `phi`; the probe below inlines that
/// join and extracts the witness from the same schedule.
pub fn extraction(phi: impl Fn(u64) -> Semi + Send + Sync + 'static) -> Lifted<u64> {
    let memo: Mutex<Vec<Semi>> = Mutex::new(Vec::new());
    Lifted::from_stable_probe(move |fuel| {
        for k in 0..=fuel {
            let (n, g) = unpair(k);
            let s = {
                let mut memo = memo.lock().unwrap();
                while memo.len() <= n as usize {
                    let next = memo.len() as u64;
                    memo.push(phi(next));
                }
                memo[n as usize].clone()
            };
            if s.probe(g) {
                return Some(n);
            }
        }
        None
    })
}

type BitFn = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// An element of the one-point compactification of the naturals: an
/// antimonotone binary sequence. The finite element `n` is `n` ones followed
/// by zeros; infinity is all ones.
#[derive(Clone)]
pub struct OmegaBar {
    bit: BitFn,
}

impl OmegaBar {
    /// The finite element `n`: `bit(i) = 1` iff `i < n`.
    pub fn finite(n: u64) -> Self {
        OmegaBar { bit: Arc::new(move |i| i < n) }
    }

    /// The point at infinity: all ones.
    pub fn infinity() -> Self {
        OmegaBar { bit: Arc::new(|_| true) }
    }

    /// The retraction from arbitrary binary sequences: `bit(n)` is the
    /// minimum of the first `n + 1` values, which is antimonotone by
    /// construction. This is also the only way to wrap a raw sequence, so
    /// every `OmegaBar` satisfies the antimonotonicity invariant.
    pub fn retract(alpha: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        OmegaBar { bit: Arc::new(move |n| (0..=n).all(|i| alpha(i))) }
    }

    pub fn bit(&self, n: u64) -> bool {
        (self.bit)(n)
    }

    /// Decides `n < self` exactly, with no fuel.
    pub fn gt_nat(&self, n: u64) -> bool {
        self.bit(n)
    }

    /// Decides `self <= n` exactly, with no fuel.
    pub fn le_nat(&self, n: u64) -> bool {
        !self.bit(n)
    }
}

impl std::fmt::Debug for OmegaBar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OmegaBar(..)")
    }
}

/// The quotient map to the semidecidable truth values: accepts at fuel `f`
/// iff some bit among the first `f + 1` is zero.
pub fn omega_lt_infty(t: &OmegaBar) -> Semi {
    let t = t.clone();
    Semi::from_monotone_probe(move |f| (0..=f).any(|n| !t.bit(n)))
}
