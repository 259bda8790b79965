//! Monotone enumeration machines and waiting-argument searches.
//!
//! A [`MonotoneMachine`] is the concrete form of a Scott-continuous
//! predicate on enumerations: its verdict depends only on the finite set of
//! values observed so far plus fuel, monotonically in both. Running one
//! against a point of the Scott domain instruments the run, and acceptance
//! comes with a [`SupportCertificate`] — the finite part of the point the
//! machine actually consumed — which can be replayed, minimized, and used to
//! bound searches over the compactified naturals.

mod lang;

pub use lang::{parse_machine, MachineParseError};

use crate::nat::unpair;
use crate::sigma::{OmegaBar, Semi};
use crate::spaces::ScottPoint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

type StepFn = Arc<dyn Fn(&BTreeSet<u64>, u64) -> bool + Send + Sync>;

/// An acceptor on enumerations: a pure function of the observed finite set
/// and the fuel, monotone in both. Monotonicity is the caller's obligation
/// for hand-rolled machines; it is spot-checked at acceptance time and
/// violations surface as [`EngineError::ContractViolation`].
#[derive(Clone)]
pub struct MonotoneMachine {
    step: StepFn,
}

impl MonotoneMachine {
    pub fn from_monotone_step(
        step: impl Fn(&BTreeSet<u64>, u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        MonotoneMachine { step: Arc::new(step) }
    }

    /// Accepts once every element of `required` has been observed.
    pub fn has_all(required: BTreeSet<u64>) -> Self {
        MonotoneMachine::from_monotone_step(move |observed, _| {
            required.iter().all(|e| observed.contains(e))
        })
    }

    pub fn accept_immediately() -> Self {
        MonotoneMachine::has_all(BTreeSet::new())
    }

    pub fn never() -> Self {
        MonotoneMachine::from_monotone_step(|_, _| false)
    }

    /// Delays another machine until the given fuel has elapsed.
    pub fn after_fuel(self, threshold: u64) -> Self {
        let inner = self.step;
        MonotoneMachine::from_monotone_step(move |observed, fuel| {
            fuel >= threshold && inner(observed, fuel)
        })
    }

    pub fn and(&self, other: &MonotoneMachine) -> Self {
        let a = self.step.clone();
        let b = other.step.clone();
        MonotoneMachine::from_monotone_step(move |o, f| a(o, f) && b(o, f))
    }

    pub fn or(&self, other: &MonotoneMachine) -> Self {
        let a = self.step.clone();
        let b = other.step.clone();
        MonotoneMachine::from_monotone_step(move |o, f| a(o, f) || b(o, f))
    }

    pub fn step(&self, observed: &BTreeSet<u64>, fuel: u64) -> bool {
        (self.step)(observed, fuel)
    }

    /// The induced semidecidable membership of a Scott point.
    pub fn on_point(&self, point: &ScottPoint) -> Semi {
        let machine = self.clone();
        let items = point.items().clone();
        Semi::from_monotone_probe(move |f| {
            let observed = items.observed(f);
            machine.step(&observed, f)
        })
    }
}

impl std::fmt::Debug for MonotoneMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MonotoneMachine(..)")
    }
}

/// One observation event: which index was seen, at what fuel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: u64,
    pub fuel: u64,
}

/// Proof that a machine accepts a point: replaying the machine on exactly
/// `support` at `fuel` accepts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCertificate {
    pub support: BTreeSet<u64>,
    pub fuel: u64,
    pub trace: Vec<TraceEntry>,
}

impl SupportCertificate {
    pub fn replays_on(&self, machine: &MonotoneMachine) -> bool {
        machine.step(&self.support, self.fuel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("certificate does not replay on the machine")]
    InvalidCertificate,
    #[error("premise failed: the machine does not accept the limit point within budget")]
    PremiseFailed,
    #[error("machine monotonicity violated: {detail}")]
    ContractViolation { detail: String },
}

/// Runs a machine against a Scott point, consuming the enumeration one
/// position per fuel unit. On acceptance, the certificate's support is the
/// set of values consumed so far, a subset of the point's enumerated set.
pub fn accepts(
    machine: &MonotoneMachine,
    point: &ScottPoint,
    budget: u64,
) -> Result<SupportCertificate, EngineError> {
    let mut observed: BTreeSet<u64> = BTreeSet::new();
    let mut trace: Vec<TraceEntry> = Vec::new();
    for fuel in 0..=budget {
        if machine.step(&observed, fuel) {
            spot_check_monotone(machine, &observed, fuel)?;
            return Ok(SupportCertificate { support: observed, fuel, trace });
        }
        if fuel == budget {
            break;
        }
        if let Some(value) = point.items().at(fuel) {
            if observed.insert(value) {
                trace.push(TraceEntry { index: value, fuel });
            }
        }
    }
    Err(EngineError::BudgetExhausted { budget })
}

/// A cheap monotonicity probe at the acceptance site: a superset at the same
/// fuel and the same set at higher fuel must still accept.
fn spot_check_monotone(
    machine: &MonotoneMachine,
    observed: &BTreeSet<u64>,
    fuel: u64,
) -> Result<(), EngineError> {
    let extra = observed.iter().next_back().map(|m| m + 1).unwrap_or(0);
    let mut superset = observed.clone();
    superset.insert(extra);
    if !machine.step(&superset, fuel) {
        return Err(EngineError::ContractViolation {
            detail: format!("acceptance retracted when {extra} was added to the support"),
        });
    }
    if !machine.step(observed, fuel.saturating_add(1)) {
        return Err(EngineError::ContractViolation {
            detail: "acceptance retracted at higher fuel".to_string(),
        });
    }
    Ok(())
}

/// Greedy inclusion-minimization of a certificate's support, removing
/// largest elements first; sound by machine monotonicity.
pub fn shrink_support(
    machine: &MonotoneMachine,
    certificate: &SupportCertificate,
) -> Result<SupportCertificate, EngineError> {
    if !certificate.replays_on(machine) {
        return Err(EngineError::InvalidCertificate);
    }
    let mut support = certificate.support.clone();
    let elements: Vec<u64> = support.iter().rev().copied().collect();
    for e in elements {
        support.remove(&e);
        if !machine.step(&support, certificate.fuel) {
            support.insert(e);
        }
    }
    let trace = certificate
        .trace
        .iter()
        .filter(|t| support.contains(&t.index))
        .copied()
        .collect();
    Ok(SupportCertificate { support, fuel: certificate.fuel, trace })
}

/// Searches for a finite stage at which an open set of the compactified
/// naturals, presented as `machine` composed with `f`, is already entered.
///
/// The machine is first run on `f(infinity)`; the certificate's fuel bounds
/// the first scan over finite stages (the instrumented run says how much of
/// the point the machine inspected), and the scan falls back to rounds of
/// doubled budgets until the global budget runs out.
pub fn wso_search(
    f: impl Fn(&OmegaBar) -> ScottPoint,
    machine: &MonotoneMachine,
    budget: u64,
) -> Result<u64, EngineError> {
    let limit_cert = match accepts(machine, &f(&OmegaBar::infinity()), budget) {
        Ok(cert) => cert,
        Err(EngineError::BudgetExhausted { .. }) => return Err(EngineError::PremiseFailed),
        Err(other) => return Err(other),
    };

    let mut per_stage = limit_cert.fuel.saturating_add(1);
    let mut spent = 0u64;
    loop {
        for n in 0..=per_stage {
            spent = spent.saturating_add(per_stage);
            if spent > budget.saturating_mul(2) {
                return Err(EngineError::BudgetExhausted { budget });
            }
            match accepts(machine, &f(&OmegaBar::finite(n)), per_stage) {
                Ok(_) => return Ok(n),
                Err(EngineError::BudgetExhausted { .. }) => {}
                Err(other) => return Err(other),
            }
        }
        if per_stage >= budget {
            return Err(EngineError::BudgetExhausted { budget });
        }
        per_stage = per_stage.saturating_mul(2).min(budget);
    }
}

type EnumeratePoint<P> = Arc<dyn Fn(u64) -> Option<P> + Send + Sync>;

/// A subset presented by an enumeration of its points (skips allowed):
/// exactly the data making bounded existential search possible.
#[derive(Clone)]
pub struct OvertSubset<P> {
    enumerate: EnumeratePoint<P>,
}

impl<P: Clone + Send + Sync + 'static> OvertSubset<P> {
    pub fn new(enumerate: impl Fn(u64) -> Option<P> + Send + Sync + 'static) -> Self {
        OvertSubset { enumerate: Arc::new(enumerate) }
    }

    pub fn empty() -> Self {
        OvertSubset::new(|_| None)
    }

    pub fn from_points(points: Vec<P>) -> Self {
        OvertSubset::new(move |n| points.get(n as usize).cloned())
    }

    pub fn at(&self, n: u64) -> Option<P> {
        (self.enumerate)(n)
    }
}

impl<P> std::fmt::Debug for OvertSubset<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OvertSubset(..)")
    }
}

/// A successful existential search over an overt subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundPoint<P> {
    pub point: P,
    pub enumeration_index: u64,
    pub fuel: u64,
}

/// Dovetails a semidecidable predicate over an enumerated set, returning the
/// first hit in `pair(index, fuel)` order.
pub fn overt_exists<P: Clone + Send + Sync + 'static>(
    subset: &OvertSubset<P>,
    phi: impl Fn(&P) -> Semi,
    budget: u64,
) -> Result<FoundPoint<P>, EngineError> {
    let mut semis: Vec<Option<Option<Semi>>> = Vec::new();
    for k in 0..=budget {
        let (index, fuel) = unpair(k);
        let slot = index as usize;
        if semis.len() <= slot {
            semis.resize(slot + 1, None);
        }
        if semis[slot].is_none() {
            semis[slot] = Some(subset.at(index).map(|p| phi(&p)));
        }
        if let Some(Some(semi)) = &semis[slot] {
            if semi.probe(fuel) {
                let point = subset.at(index).expect("enumeration must be a pure function");
                return Ok(FoundPoint { point, enumeration_index: index, fuel });
            }
        }
    }
    Err(EngineError::BudgetExhausted { budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::{markov_run, MarkovOutcome};
    use crate::spaces::{ball_member, DyadicReal};
    use crate::dyadic::Dyadic;

    fn set(items: &[u64]) -> BTreeSet<u64> {
        items.iter().copied().collect()
    }

    #[test]
    fn accepts_collects_the_consumed_support() {
        let m = MonotoneMachine::has_all(set(&[2, 5]));
        let cert = accepts(&m, &ScottPoint::all_naturals(), 1000).unwrap();
        assert!(cert.support.is_superset(&set(&[2, 5])));
        assert!(cert.support.iter().all(|&v| v <= 5));
        assert!(cert.replays_on(&m));
    }

    #[test]
    fn accept_immediately_has_empty_support() {
        let cert = accepts(&MonotoneMachine::accept_immediately(), &ScottPoint::evens(), 10).unwrap();
        assert!(cert.support.is_empty());
        assert_eq!(cert.fuel, 0);
    }

    #[test]
    fn never_accepting_exhausts_budget() {
        let r = accepts(&MonotoneMachine::never(), &ScottPoint::all_naturals(), 100);
        assert_eq!(r, Err(EngineError::BudgetExhausted { budget: 100 }));
    }

    #[test]
    fn non_monotone_machine_detected() {
        // Accepts only on exactly {0}: adding an element retracts acceptance.
        let bad = MonotoneMachine::from_monotone_step(|o: &BTreeSet<u64>, _| {
            o.len() == 1 && o.contains(&0)
        });
        let r = accepts(&bad, &ScottPoint::all_naturals(), 100);
        assert!(matches!(r, Err(EngineError::ContractViolation { .. })));
    }

    #[test]
    fn shrink_reaches_the_required_core() {
        let m = MonotoneMachine::has_all(set(&[2, 5]));
        let cert = accepts(&m, &ScottPoint::all_naturals(), 1000).unwrap();
        let small = shrink_support(&m, &cert).unwrap();
        assert_eq!(small.support, set(&[2, 5]));
        assert!(small.replays_on(&m));
        // Already minimal: unchanged.
        let again = shrink_support(&m, &small).unwrap();
        assert_eq!(again.support, small.support);
    }

    #[test]
    fn tampered_certificate_rejected() {
        let m = MonotoneMachine::has_all(set(&[2, 5]));
        let forged = SupportCertificate { support: set(&[1]), fuel: 3, trace: vec![] };
        assert_eq!(shrink_support(&m, &forged), Err(EngineError::InvalidCertificate));
    }

    #[test]
    fn extension_property_on_covering_points() {
        // Scott continuity, the testable way: any point whose enumeration
        // covers an accepted support is accepted too.
        let m = MonotoneMachine::has_all(set(&[2, 5]));
        let cert = accepts(&m, &ScottPoint::all_naturals(), 1000).unwrap();
        let covering = ScottPoint::from_set(cert.support.union(&set(&[40, 41])).copied().collect());
        assert!(accepts(&m, &covering, 1000).is_ok());
    }

    #[test]
    fn wso_search_identity_embedding() {
        let f = |t: &OmegaBar| ScottPoint::below_omega(t);
        let m = MonotoneMachine::accept_immediately();
        assert_eq!(wso_search(f, &m, 10_000), Ok(0));
        // Waiting for 3 to appear: the least finite stage containing 3 is 4.
        let m3 = MonotoneMachine::has_all(set(&[3]));
        assert_eq!(wso_search(f, &m3, 10_000), Ok(4));
        // A machine rejecting the limit point fails the premise.
        assert_eq!(wso_search(f, &MonotoneMachine::never(), 1000), Err(EngineError::PremiseFailed));
    }

    #[test]
    fn wso_search_result_passes_independent_check() {
        let f = |t: &OmegaBar| ScottPoint::below_omega(t);
        let m = MonotoneMachine::has_all(set(&[3])).after_fuel(7);
        let n = wso_search(f, &m, 10_000).unwrap();
        assert!(accepts(&m, &f(&OmegaBar::finite(n)), 10_000).is_ok());
    }

    #[test]
    fn overt_exists_finds_the_even_point() {
        // Even integers as represented reals; looking for a point in B(12, 1).
        let evens = OvertSubset::new(|n| {
            Some(DyadicReal::exact(Dyadic::from_int(2 * n as i64)))
        });
        let found = overt_exists(
            &evens,
            |x| ball_member(x, &Dyadic::from_int(12), &Dyadic::one()),
            100_000,
        )
        .unwrap();
        assert_eq!(found.point.approx(10), Dyadic::from_int(12));
        // The returned hit passes an independent bounded search.
        let semi = ball_member(&found.point, &Dyadic::from_int(12), &Dyadic::one());
        assert!(matches!(markov_run(&semi, 1000), MarkovOutcome::Accepted { .. }));
    }

    #[test]
    fn overt_exists_on_empty_enumeration_exhausts() {
        let empty: OvertSubset<DyadicReal> = OvertSubset::empty();
        let r = overt_exists(&empty, |_| Semi::top(), 1000);
        assert!(matches!(r, Err(EngineError::BudgetExhausted { .. })));
    }

    #[test]
    fn overt_exists_with_top_returns_first_point() {
        let pts = OvertSubset::from_points(vec![
            DyadicReal::exact(Dyadic::from_int(9)),
            DyadicReal::exact(Dyadic::from_int(5)),
        ]);
        let found = overt_exists(&pts, |_| Semi::top(), 1000).unwrap();
        assert_eq!(found.enumeration_index, 0);
        assert_eq!(found.point.approx(4), Dyadic::from_int(9));
    }
}
