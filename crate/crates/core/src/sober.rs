//! Point recovery from neighborhood-filter oracles.
//!
//! Sobriety, read as an algorithm: a consistent filter of basic opens
//! determines a point, and the point can be searched out. For dyadic reals
//! the search builds a chain of formally nested accepted balls with radii
//! `2^-k` and returns the chain of centers as a fast Cauchy representative,
//! carrying the chain itself as a checkable certificate. For algebraic cpos
//! the accepted compacts are simply enumerated. A bounded checker for the
//! equational filter laws rounds out the module: it can confirm violations
//! at a given fuel, never prove lawfulness.

use crate::dyadic::{formal_ball_inclusion, Ball, Dyadic};
use crate::kernel::{run, Program};
use crate::nat::{checked_pair, unpair};
use crate::sigma::Semi;
use crate::spaces::{
    dense_point, AlgebraicCpo, CpoPoint, DyadicReal, DyadicSpace, Enumeration, Space,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type QueryFn = Arc<dyn Fn(u64, u64) -> bool + Send + Sync>;

/// A caller-supplied neighborhood-filter claim: `query(index, fuel)` is
/// monotone in fuel and purports to be "the point is in basic open `index`".
#[derive(Clone)]
pub struct FilterOracle {
    query: QueryFn,
}

impl FilterOracle {
    pub fn from_monotone_query(query: impl Fn(u64, u64) -> bool + Send + Sync + 'static) -> Self {
        FilterOracle { query: Arc::new(query) }
    }

    /// The genuine filter oracle of a point of a space.
    pub fn of_point<S: Space>(space: &S, point: &S::Point) -> Self {
        let space = space.clone();
        let point = point.clone();
        let memo: Mutex<HashMap<u64, Semi>> = Mutex::new(HashMap::new());
        FilterOracle::from_monotone_query(move |index, fuel| {
            let semi = {
                let mut memo = memo.lock().unwrap();
                memo.entry(index).or_insert_with(|| space.base_member(index, &point)).clone()
            };
            semi.probe(fuel)
        })
    }

    /// An oracle backed by a kernel program run on `pair(index, fuel)`:
    /// accepts when the program halts with nonzero output within the given
    /// machine fuel. Monotonicity in fuel is the program's obligation.
    pub fn from_program(program: Program, machine_fuel: u64) -> Self {
        let program = Arc::new(program);
        FilterOracle::from_monotone_query(move |index, fuel| {
            let Some(input) = checked_pair(index, fuel) else { return false };
            run(&program, input, machine_fuel).output().is_some_and(|v| v != 0)
        })
    }

    pub fn query(&self, index: u64, fuel: u64) -> bool {
        (self.query)(index, fuel)
    }
}

impl std::fmt::Debug for FilterOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FilterOracle(..)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SoberError {
    #[error("budget of {budget} oracle queries exhausted at chain level {level}")]
    BudgetExhausted { budget: u64, level: u64 },
}

/// A recovered real together with its certificate: the accepted chain of
/// formally nested balls, level `k` having radius `2^-k`.
#[derive(Debug, Clone)]
pub struct RecoveredReal {
    pub real: DyadicReal,
    pub chain: Vec<Ball>,
    pub queries_used: u64,
}

/// The serializable face of the certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallChain {
    pub balls: Vec<Ball>,
}

impl BallChain {
    /// Re-checks the certificate against an oracle: each ball accepted at
    /// some fuel up to `fuel`, radii `2^-k`, and consecutive balls formally
    /// nested.
    pub fn verify(&self, oracle: &FilterOracle, fuel: u64) -> bool {
        for (k, ball) in self.balls.iter().enumerate() {
            if ball.radius != Dyadic::pow2(-(k as i64)) {
                return false;
            }
            let Some(code) = crate::spaces::encode_ball(ball) else { return false };
            if !oracle.query(code, fuel) {
                return false;
            }
            if k > 0 && !formal_ball_inclusion(ball, &self.balls[k - 1]) {
                return false;
            }
        }
        true
    }
}

/// One level of the nested-chain search: candidate balls of radius `2^-k`,
/// dovetailed against fuel, most central candidates first.
struct LevelSearch {
    selected: Option<Ball>,
    candidates: LevelCandidates,
    cursor: u64,
    /// Centers already selected at this level; skipped on re-selection so a
    /// backtrack always advances to a genuinely different ball.
    used: std::collections::BTreeSet<Dyadic>,
}

enum LevelCandidates {
    /// Level 0: all radius-1 balls over the dense sequence.
    Dense,
    /// Deeper levels: the finite grid of centers inside the previous ball.
    Grid(Vec<Ball>),
}

impl LevelSearch {
    fn root() -> Self {
        LevelSearch {
            selected: None,
            candidates: LevelCandidates::Dense,
            cursor: 0,
            used: Default::default(),
        }
    }

    /// Grid candidates at granularity `2^-(k+3)` within the parent ball,
    /// ordered by distance from the parent center. Central candidates give
    /// the nesting margin the next level will need.
    fn below(parent: &Ball, k: u64) -> Self {
        let radius = Dyadic::pow2(-(k as i64));
        let step = k + 3;
        let lo = (&parent.center - &parent.radius).mul_pow2(step as i64).floor_int();
        let hi = (&parent.center + &parent.radius).mul_pow2(step as i64).floor_int();
        let mut grid: Vec<Ball> = Vec::new();
        let mut m = lo;
        while m <= hi {
            let center = Dyadic::new(m.clone(), -(step as i64));
            grid.push(Ball { center, radius: radius.clone() });
            m += 1;
        }
        grid.sort_by(|a, b| {
            let da = (&a.center - &parent.center).abs();
            let db = (&b.center - &parent.center).abs();
            da.cmp(&db).then_with(|| a.center.cmp(&b.center))
        });
        LevelSearch {
            selected: None,
            candidates: LevelCandidates::Grid(grid),
            cursor: 0,
            used: Default::default(),
        }
    }

    fn candidate(&self, rank: u64, level: u64) -> Option<Ball> {
        match &self.candidates {
            LevelCandidates::Dense => {
                let _ = level;
                Some(Ball { center: dense_point(rank), radius: Dyadic::one() })
            }
            LevelCandidates::Grid(grid) => grid.get(rank as usize).cloned(),
        }
    }
}

/// Recovers a real from a filter oracle, to `precision` chain levels.
///
/// At each level the search dovetails (candidate rank, fuel) on the pairing
/// schedule, accepting the first candidate that the oracle accepts and that
/// formally nests inside the previous ball. A level that burns its quantum
/// without success backtracks: the parent resumes its own dovetail and the
/// level restarts under the parent's next selection. Deterministic
/// throughout; inconsistent oracles surface as budget exhaustion, never as
/// wrong points.
pub fn recover_real(
    oracle: &FilterOracle,
    precision: u64,
    budget: u64,
) -> Result<RecoveredReal, SoberError> {
    const LEVEL_QUANTUM: u64 = 4096;

    let mut queries: u64 = 0;
    let mut stack: Vec<LevelSearch> = vec![LevelSearch::root()];

    loop {
        let level = (stack.len() - 1) as u64;
        let parent_ball: Option<Ball> =
            (stack.len() >= 2).then(|| stack[stack.len() - 2].selected.clone().expect("parent"));
        let quantum_end = stack.last().unwrap().cursor.saturating_add(LEVEL_QUANTUM);

        let mut advanced = false;
        while stack.last().unwrap().cursor < quantum_end {
            let state = stack.last_mut().unwrap();
            let (rank, fuel) = unpair(state.cursor);
            state.cursor += 1;
            let Some(ball) = state.candidate(rank, level) else { continue };
            if state.used.contains(&ball.center) {
                continue;
            }
            // The nesting filter is exact and free; only then pay for a query.
            if let Some(parent) = &parent_ball {
                if !formal_ball_inclusion(&ball, parent) {
                    continue;
                }
            }
            let Some(code) = crate::spaces::encode_ball(&ball) else { continue };
            queries += 1;
            if queries > budget {
                return Err(SoberError::BudgetExhausted { budget, level });
            }
            if oracle.query(code, fuel) {
                let state = stack.last_mut().unwrap();
                state.used.insert(ball.center.clone());
                state.selected = Some(ball);
                advanced = true;
                break;
            }
        }

        if advanced {
            if level == precision {
                let chain: Vec<Ball> =
                    stack.iter().map(|s| s.selected.clone().expect("selected")).collect();
                let centers: Vec<Dyadic> = chain.iter().map(|b| b.center.clone()).collect();
                let real = DyadicReal::from_fn(move |k| {
                    centers[(k as usize).min(centers.len() - 1)].clone()
                });
                return Ok(RecoveredReal { real, chain, queries_used: queries });
            }
            let parent = stack.last().unwrap().selected.clone().unwrap();
            stack.push(LevelSearch::below(&parent, level + 1));
        } else if stack.len() > 1 {
            // Quantum burned with nothing found: the parent resumes its own
            // dovetail and this level restarts under its next selection.
            stack.pop();
            stack.last_mut().unwrap().selected = None;
        }
        // The root level keeps scanning; only the budget stops it.
    }
}

/// Enumerates the compacts whose upsets the oracle accepts: the recovered
/// point of an algebraic cpo. Total; position `pair(i, f)` emits compact
/// index `i` exactly when the oracle accepts it at fuel `f`.
pub fn recover_cpo_point<C: AlgebraicCpo>(oracle: &FilterOracle, cpo: &C) -> CpoPoint {
    let oracle = oracle.clone();
    let cpo = cpo.clone();
    CpoPoint::new(Enumeration::new(move |n| {
        let (index, fuel) = unpair(n);
        (cpo.compact(index).is_some() && oracle.query(index, fuel)).then_some(index)
    }))
}

/// A sample for the filter-law checker: three finite sets of base indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawSample {
    pub t: Vec<u64>,
    pub t_prime: Vec<u64>,
    pub t_meet: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub sample: LawSample,
    /// Join respect: equal unions must give equal existential answers.
    pub join_respect: Verdict,
    /// The truncated full join is accepted.
    pub covers_top: Verdict,
    /// Meet respect: the accepted meet instance matches.
    pub meet_respect: Verdict,
}

impl SampleReport {
    pub fn failed(&self) -> bool {
        self.join_respect == Verdict::Fail
            || self.covers_top == Verdict::Fail
            || self.meet_respect == Verdict::Fail
    }
}

/// Bounded check of the equational filter laws on the given samples.
///
/// `K(T)` is the bounded existential "some index in `T` is accepted at the
/// shared fuel". Premises (equality of unions, the meet instance) are
/// verified on the supplied sample points first; a sample whose premise the
/// points refute is reported inconclusive rather than judged. A failure is
/// always a bounded refutation: premises confirmed, conclusion silent at
/// the fuel.
pub fn check_filter_laws<S: Space>(
    oracle: &FilterOracle,
    space: &S,
    sample_points: &[S::Point],
    samples: &[LawSample],
    fuel: u64,
    top_truncation: u64,
) -> Vec<SampleReport> {
    let member = |index: u64, point: &S::Point| space.base_member(index, point).probe(fuel);
    let in_union = |set: &[u64], point: &S::Point| set.iter().any(|&i| member(i, point));
    let k_of = |set: &[u64]| set.iter().any(|&i| oracle.query(i, fuel));

    samples
        .iter()
        .map(|sample| {
            let t = &sample.t;
            let tp = &sample.t_prime;
            let tm = &sample.t_meet;

            // Condition: equal unions give equal answers.
            let joins_plausible =
                sample_points.iter().all(|y| in_union(t, y) == in_union(tp, y));
            let join_respect = if !joins_plausible {
                Verdict::Inconclusive
            } else {
                match (k_of(t), k_of(tp)) {
                    (true, true) => Verdict::Pass,
                    (false, false) => Verdict::Inconclusive,
                    _ => Verdict::Fail,
                }
            };

            // Condition: the truncated top is covered.
            let covers_top = if (0..top_truncation).any(|i| oracle.query(i, fuel)) {
                Verdict::Pass
            } else {
                Verdict::Inconclusive
            };

            // Condition: meet respect on a sampled-verified meet instance.
            let meet_plausible = sample_points
                .iter()
                .all(|y| (in_union(t, y) && in_union(tp, y)) == in_union(tm, y));
            let meet_respect = if !meet_plausible {
                Verdict::Inconclusive
            } else if !(k_of(t) && k_of(tp)) {
                Verdict::Inconclusive
            } else if k_of(tm) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };

            SampleReport { sample: sample.clone(), join_respect, covers_top, meet_respect }
        })
        .collect()
}

/// Exact-by-construction law samples for the dyadic-real space, built from
/// nested and disjoint formal balls around the given anchors.
pub fn dyadic_law_samples(anchors: &[Dyadic], radius_exp: u64) -> Vec<LawSample> {
    let mut samples = Vec::new();
    for anchor in anchors {
        let outer = Ball { center: anchor.round_to(1), radius: Dyadic::one() };
        let inner = Ball {
            center: anchor.round_to(radius_exp as u32 + 2),
            radius: Dyadic::pow2(-(radius_exp as i64)),
        };
        if !formal_ball_inclusion(&inner, &outer) {
            continue;
        }
        let far = Ball {
            center: &outer.center + &Dyadic::from_int(4),
            radius: Dyadic::one(),
        };
        let (Some(o), Some(i), Some(f)) = (
            crate::spaces::encode_ball(&outer),
            crate::spaces::encode_ball(&inner),
            crate::spaces::encode_ball(&far),
        ) else {
            continue;
        };
        // B_outer ∩ B_inner = B_inner, exactly.
        samples.push(LawSample { t: vec![o], t_prime: vec![i], t_meet: vec![i] });
        // Absorption: the union is unchanged by the nested ball.
        samples.push(LawSample { t: vec![o], t_prime: vec![o, i], t_meet: vec![o] });
        // The violating shape: both premises through the inner ball, the
        // conclusion forced through the outer one.
        samples.push(LawSample { t: vec![i, o], t_prime: vec![i, o], t_meet: vec![o] });
        // Disjoint balls meet in the empty set.
        samples.push(LawSample { t: vec![o], t_prime: vec![f], t_meet: vec![] });
    }
    samples
}

/// The sample points used to gate premises for [`dyadic_law_samples`].
pub fn dyadic_sample_points(anchors: &[Dyadic]) -> Vec<DyadicReal> {
    let mut points: Vec<DyadicReal> = anchors.iter().cloned().map(DyadicReal::exact).collect();
    for k in -3i64..=3 {
        points.push(DyadicReal::exact(Dyadic::new(k.into(), -1)));
    }
    points
}

/// Convenience: the genuine neighborhood oracle of a real point.
pub fn nbh_oracle(x: &DyadicReal) -> FilterOracle {
    FilterOracle::of_point(&DyadicSpace, x)
}
