//! Regularity witnesses, separation witnesses, and the modulus-of-continuity
//! extractor.
//!
//! The continuity route: to get a modulus for `f` at `x` with target `eps`,
//! build a regularity pair in the codomain around `f(x)` — an inner ball `S`
//! and a lazily covered outer region `T` with a verified gap — pull both
//! back through `f` (the preimage of `S` as a monotone machine over the
//! domain's base, the preimage of `T` as an overt subset via the dense
//! dyadics), and run the separation search. The finite intersection of
//! domain balls it returns converts into a single dyadic `delta`,
//! under-approximated so that soundness survives every rounding.

mod expr;

pub use expr::{parse_expr, Expr, ExprParseError};

use crate::dyadic::{Ball, Dyadic, Interval};
use crate::engine::{
    accepts, shrink_support, EngineError, MonotoneMachine, OvertSubset, SupportCertificate,
};
use crate::nat::unpair;
use crate::sigma::{markov_run, MarkovOutcome};
use crate::spaces::{decode_ball, dense_point, nbh, DyadicReal, DyadicSpace, Space};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KlstError {
    #[error("upper bound {q_upper} on the distance is not below the radius {radius}")]
    BadBound { q_upper: String, radius: String },
    #[error("the semidecidable set does not accept the point's filter within budget")]
    PremiseFailed,
    #[error(
        "disjointness premise refuted: enumerated point {enumeration_index} lies in the witness"
    )]
    ContradictionDetected { enumeration_index: u64 },
    #[error("budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("machine monotonicity violated: {detail}")]
    ContractViolation { detail: String },
}

impl From<EngineError> for KlstError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::BudgetExhausted { budget } => KlstError::BudgetExhausted { budget },
            EngineError::PremiseFailed => KlstError::PremiseFailed,
            EngineError::InvalidCertificate => {
                KlstError::ContractViolation { detail: "certificate failed to replay".into() }
            }
            EngineError::ContractViolation { detail } => KlstError::ContractViolation { detail },
        }
    }
}

/// A pointwise regularity pair at a point inside a ball `B(y, r)`: an inner
/// ball `S` around the point and the region `T = {z : |z - y| > bound}`,
/// presented through its lazy cover by formal balls. `S` and `T` are
/// disjoint by construction and `B(y, r) ∪ T` is everything.
#[derive(Clone)]
pub struct RegularityWitness {
    pub inner: Ball,
    pub center: Dyadic,
    pub radius: Dyadic,
    pub complement_bound: Dyadic,
    cover: Arc<dyn Fn(u64) -> Option<Ball> + Send + Sync>,
}

impl RegularityWitness {
    /// The `m`-th ball of the lazy cover of `T`, if position `m` is not a
    /// skip.
    pub fn cover_ball(&self, m: u64) -> Option<Ball> {
        (self.cover)(m)
    }

    /// Exact membership of a dyadic point in `T`.
    pub fn complement_contains(&self, z: &Dyadic) -> bool {
        (z - &self.center).abs() > self.complement_bound
    }
}

impl std::fmt::Debug for RegularityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RegularityWitness {{ inner: B({}, {}), bound: {} }}",
            self.inner.center, self.inner.radius, self.complement_bound
        )
    }
}

/// Smallest `p` with `2^-p <= value / 8`; the guard precision used for the
/// dyadic roundings below.
fn guard_precision(value: &Dyadic) -> u32 {
    let eighth = value.mul_pow2(-3);
    let mut p = 0u32;
    while Dyadic::pow2(-(p as i64)) > eighth {
        p += 1;
    }
    p
}

/// Builds the regularity pair for `x` inside `B(y, r)`, given a certified
/// upper bound `q_upper` on `d(x, y)`.
///
/// The paper-shaped thirds are rounded to dyadics: the inner radius is the
/// floor of `(r - q)/3`, the complement bound the ceiling of `(2r + q)/3`,
/// both at a precision fine enough (an eighth of the gap) that the inner
/// ball keeps the point, disjointness survives, and the bound stays below
/// `r`.
pub fn regularity_witness(
    x: &DyadicReal,
    y: &Dyadic,
    r: &Dyadic,
    q_upper: &Dyadic,
) -> Result<RegularityWitness, KlstError> {
    if q_upper >= r || q_upper.is_negative() {
        return Err(KlstError::BadBound { q_upper: q_upper.to_string(), radius: r.to_string() });
    }
    let gap = r - q_upper;
    let p = guard_precision(&gap);

    // The claimed bound must be consistent with the point at working
    // precision: q_upper >= |approx(p) - y| - 2^-p.
    let working = x.approx(p as u64);
    if *q_upper < &(&working - y).abs() - &Dyadic::pow2(-(p as i64)) {
        return Err(KlstError::BadBound { q_upper: q_upper.to_string(), radius: r.to_string() });
    }

    let inner_radius = gap.div_floor(3, p);
    let inner = Ball { center: working, radius: inner_radius };
    let two_r_q = &(r + r) + q_upper;
    let bound = two_r_q.div_ceil(3, p);

    let center = y.clone();
    let cover_center = center.clone();
    let cover_bound = bound.clone();
    let cover = Arc::new(move |m: u64| {
        let (n, k) = unpair(m);
        let c = dense_point(n);
        let radius = Dyadic::pow2(-(k as i64));
        ((&c - &cover_center).abs() > &radius + &cover_bound).then_some(Ball { center: c, radius })
    });

    Ok(RegularityWitness { inner, center, radius: r.clone(), complement_bound: bound, cover })
}

/// A separation witness: a finite set of base indices whose basic opens all
/// contain the point, with the instrumented certificate that produced it,
/// such that no enumerated point of the overt set was found inside the
/// intersection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub indices: BTreeSet<u64>,
    pub certificate: SupportCertificate,
    pub scanned_depth: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SpreenParams {
    pub budget: u64,
    /// How far into the overt set's enumeration to scan for counterexamples.
    pub scan_depth: u64,
    /// Fuel for each bounded membership check during the scan.
    pub membership_fuel: u64,
}

impl Default for SpreenParams {
    fn default() -> Self {
        SpreenParams { budget: 1_000_000, scan_depth: 200, membership_fuel: 256 }
    }
}

/// Separates a point from an overt subset through a semidecidable set.
///
/// Runs the machine on the point's neighborhood filter; the shrunken support
/// of the instrumented acceptance is the witness, a finite intersection of
/// basic opens around the point. The overt set's enumeration is then scanned
/// for a counterexample inside the witness: finding one refutes the caller's
/// disjointness premise.
pub fn spreen_witness<S: Space>(
    space: &S,
    x: &S::Point,
    machine: &MonotoneMachine,
    overt: &OvertSubset<S::Point>,
    params: &SpreenParams,
) -> Result<SeparationWitness, KlstError> {
    let filter = nbh(space, x);
    let certificate = match accepts(machine, &filter, params.budget) {
        Ok(cert) => cert,
        Err(EngineError::BudgetExhausted { .. }) => return Err(KlstError::PremiseFailed),
        Err(other) => return Err(other.into()),
    };
    let certificate = shrink_support(machine, &certificate)?;
    let indices = certificate.support.clone();

    for d in 0..params.scan_depth {
        let Some(y) = overt.at(d) else { continue };
        let inside_all = indices.iter().all(|&i| {
            matches!(
                markov_run(&space.base_member(i, &y), params.membership_fuel),
                MarkovOutcome::Accepted { .. }
            )
        });
        if inside_all {
            return Err(KlstError::ContradictionDetected { enumeration_index: d });
        }
    }

    Ok(SeparationWitness { indices, certificate, scanned_depth: params.scan_depth })
}

/// A certified modulus of continuity: on the grid, points within `delta` of
/// the base point map within `epsilon` of its image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Modulus {
    pub function: String,
    pub at: String,
    pub epsilon: Dyadic,
    pub delta: Dyadic,
    pub witness: SeparationWitness,
}

#[derive(Debug, Clone, Copy)]
pub struct ModulusParams {
    pub budget: u64,
    pub scan_depth: u64,
    pub membership_fuel: u64,
}

impl Default for ModulusParams {
    fn default() -> Self {
        ModulusParams { budget: 1_000_000, scan_depth: 200, membership_fuel: 256 }
    }
}

/// Extracts a modulus of continuity for an expression-defined map at a
/// represented real.
pub fn modulus(
    expr: &Expr,
    x: &DyadicReal,
    eps: &Dyadic,
    params: &ModulusParams,
) -> Result<Modulus, KlstError> {
    if !eps.is_positive() {
        return Err(KlstError::BadBound { q_upper: eps.to_string(), radius: "0".into() });
    }
    let fx = expr.apply(x);

    // Codomain regularity pair around f(x): center the target ball on a
    // fine approximation and let the approximation error be the distance
    // bound.
    let p = guard_precision(eps) as u64 + 2;
    let c = fx.approx(p);
    let q_upper = Dyadic::pow2(-(p as i64));
    let witness = regularity_witness(&fx, &c, eps, &q_upper)?;

    // The preimage of S as a monotone machine over the domain's base: the
    // observed balls pin the input into an exact interval whose image under
    // the expression must land strictly inside S. Monotone because more
    // balls shrink the interval and the interval extension is
    // inclusion-monotone.
    let machine_expr = expr.clone();
    let inner = witness.inner.clone();
    let memo: Arc<Mutex<HashMap<Vec<u64>, bool>>> = Arc::new(Mutex::new(HashMap::new()));
    let machine = MonotoneMachine::from_monotone_step(move |observed, _fuel| {
        let key: Vec<u64> = observed.iter().copied().collect();
        if let Some(&v) = memo.lock().unwrap().get(&key) {
            return v;
        }
        let verdict = preimage_inside(&machine_expr, observed, &inner);
        memo.lock().unwrap().insert(key, verdict);
        verdict
    });

    // The preimage of T as an overt subset: dense dyadics whose exact images
    // land in T's lazy ball cover.
    let overt_expr = expr.clone();
    let overt_witness = witness.clone();
    let preimage_t = OvertSubset::new(move |m: u64| {
        let (n, j) = unpair(m);
        let d = dense_point(n);
        let cover = overt_witness.cover_ball(j)?;
        let image = overt_expr.eval_exact(&d);
        ((&image - &cover.center).abs() < cover.radius).then(|| DyadicReal::exact(d))
    });

    let sep = spreen_witness(
        &DyadicSpace,
        x,
        &machine,
        &preimage_t,
        &SpreenParams {
            budget: params.budget,
            scan_depth: params.scan_depth,
            membership_fuel: params.membership_fuel,
        },
    )?;

    let delta = delta_from_witness(x, &sep.indices, eps, params.budget)?;
    Ok(Modulus {
        function: expr.to_string(),
        at: format!("~{}", x.approx(20)),
        epsilon: eps.clone(),
        delta,
        witness: sep,
    })
}

/// True when the intersection of the observed formal balls maps strictly
/// inside the inner ball. An empty intersection is vacuously inside; empty
/// information is not.
fn preimage_inside(expr: &Expr, observed: &BTreeSet<u64>, inner: &Ball) -> bool {
    if observed.is_empty() {
        return false;
    }
    let mut hull: Option<Interval> = None;
    for &index in observed {
        let ball = decode_ball(index);
        let lo = &ball.center - &ball.radius;
        let hi = &ball.center + &ball.radius;
        hull = Some(match hull {
            None => Interval::new(lo, hi),
            Some(h) => {
                let new_lo = h.lo.max(lo);
                let new_hi = h.hi.min(hi);
                if new_lo > new_hi {
                    return true; // inconsistent information: vacuous
                }
                Interval::new(new_lo, new_hi)
            }
        });
    }
    let image = expr.eval_interval(&hull.unwrap());
    let lo_dist = (&image.lo - &inner.center).abs();
    let hi_dist = (&image.hi - &inner.center).abs();
    lo_dist.max(hi_dist) < inner.radius
}

/// Converts the finite ball intersection around `x` into one dyadic radius:
/// the minimum over the balls of `radius - |x - center|`, under-approximated
/// through the point's approximations.
fn delta_from_witness(
    x: &DyadicReal,
    indices: &BTreeSet<u64>,
    eps: &Dyadic,
    budget: u64,
) -> Result<Dyadic, KlstError> {
    if indices.is_empty() {
        // The machine needed no information: any radius transfers. Half of
        // eps is a sane, sound default.
        return Ok(eps.half());
    }
    let mut precision = 4u64;
    loop {
        let a = x.approx(precision);
        let err = Dyadic::pow2(-(precision as i64));
        let mut delta: Option<Dyadic> = None;
        let mut all_positive = true;
        for &index in indices {
            let ball = decode_ball(index);
            let slack = &(&ball.radius - &(&a - &ball.center).abs()) - &err;
            if !slack.is_positive() {
                all_positive = false;
                break;
            }
            delta = Some(match delta {
                None => slack,
                Some(d) => d.min(slack),
            });
        }
        if all_positive {
            return Ok(delta.expect("nonempty witness"));
        }
        precision += 4;
        if precision > budget {
            return Err(KlstError::BudgetExhausted { budget });
        }
    }
}

/// Result of the brute-force soundness check of a modulus on the dyadic
/// grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCheck {
    pub points_checked: u64,
    pub violations: Vec<String>,
}

impl GridCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a modulus by exact evaluation on every grid point of pitch
/// `2^-grid_bits` within `delta` of the base point. Grid points whose
/// membership in the delta-ball is uncertain at the working precision are
/// included, so the check errs toward testing more points.
pub fn grid_check(
    expr: &Expr,
    x: &DyadicReal,
    eps: &Dyadic,
    delta: &Dyadic,
    grid_bits: u32,
) -> GridCheck {
    let precision = grid_bits as u64 + 8;
    let a = x.approx(precision);
    let err = Dyadic::pow2(-(precision as i64));

    // f(x) enclosed tightly: the interval image of the approximation window.
    let window = Interval::new(&a - &err, &a + &err);
    let fx = expr.eval_interval(&window);

    let lo = (&(&a - delta) - &err).mul_pow2(grid_bits as i64).floor_int();
    let hi = (&(&a + delta) + &err).mul_pow2(grid_bits as i64).floor_int() + 1;

    let mut points_checked = 0u64;
    let mut violations = Vec::new();
    let mut m = lo;
    while m <= hi {
        let g = Dyadic::new(m.clone(), -(grid_bits as i64));
        m += 1;
        // Only points certainly or possibly within delta participate.
        let dist_lo = &(&g - &a).abs() - &err;
        if dist_lo >= *delta {
            continue;
        }
        points_checked += 1;
        let fg = expr.eval_exact(&g);
        // Conservative: flag unless the worst-case distance to the f(x)
        // enclosure is certainly below eps.
        let worst = (&fg - &fx.lo).abs().max((&fg - &fx.hi).abs());
        if worst >= *eps {
            violations.push(format!("|f({g}) - f(x)| not certainly below {eps}"));
        }
    }
    GridCheck { points_checked, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{prefix_encode, CantorPoint, CantorSpace};
    use num_bigint::BigInt;

    fn d(n: i64, k: u32) -> Dyadic {
        Dyadic::from_fraction_pow2(n, k)
    }

    #[test]
    fn regularity_witness_matches_the_rounding_rule() {
        let x = DyadicReal::exact(Dyadic::zero());
        let w = regularity_witness(&x, &Dyadic::zero(), &Dyadic::one(), &Dyadic::zero()).unwrap();
        // floor(1/3) at the guard precision is 1/4; ceil(2/3) is 3/4.
        assert_eq!(w.inner.radius, d(1, 2));
        assert_eq!(w.complement_bound, d(3, 2));
        assert_eq!(w.inner.center, Dyadic::zero());
        // The cover only contains balls exactly inside T.
        for m in 0..5_000u64 {
            if let Some(b) = w.cover_ball(m) {
                assert!((&b.center - &w.center).abs() > &b.radius + &w.complement_bound);
            }
        }
    }

    #[test]
    fn regularity_bad_bound() {
        let x = DyadicReal::exact(Dyadic::zero());
        let r = Dyadic::one();
        assert!(matches!(
            regularity_witness(&x, &Dyadic::zero(), &r, &r),
            Err(KlstError::BadBound { .. })
        ));
        // q_upper inconsistent with the point: x = 0, y = 2, claimed q = 0.
        assert!(matches!(
            regularity_witness(&x, &Dyadic::from_int(2), &Dyadic::from_int(8), &Dyadic::zero()),
            Err(KlstError::BadBound { .. })
        ));
    }

    #[test]
    fn regularity_with_coincident_center() {
        // x = y: q_upper = 0 is valid and S is centered on x.
        let x = DyadicReal::exact(d(1, 1));
        let w = regularity_witness(&x, &d(1, 1), &Dyadic::one(), &Dyadic::zero()).unwrap();
        assert_eq!(w.inner.center, d(1, 1));
        assert!(w.inner.radius.is_positive());
    }

    #[test]
    fn spreen_witness_on_cantor_space() {
        // x = 0^omega; the semidecidable set fixes position 2 to 0; the overt
        // set enumerates eventually-zero points with bit 2 set.
        let x = CantorPoint::zeros();
        let machine = MonotoneMachine::from_monotone_step(|observed: &BTreeSet<u64>, _| {
            observed.iter().any(|&code| {
                let prefix = crate::spaces::prefix_decode(code);
                prefix.len() >= 3 && !prefix[2]
            })
        });
        let overt = OvertSubset::new(|n| {
            // Enumerate finite strings, keep those with bit 2 set, extend by zeros.
            let prefix = crate::spaces::prefix_decode(n);
            if prefix.len() >= 3 && prefix[2] {
                Some(CantorPoint::eventually_constant(prefix, false))
            } else {
                None
            }
        });
        let params = SpreenParams { budget: 100_000, scan_depth: 200, membership_fuel: 64 };
        let w = spreen_witness(&CantorSpace, &x, &machine, &overt, &params).unwrap();
        // The witness is the code of the prefix 000.
        let expected = prefix_encode(&[false, false, false]).unwrap();
        assert_eq!(w.indices, [expected].into_iter().collect());
        assert!(w.certificate.replays_on(&machine));
    }

    #[test]
    fn spreen_accept_immediately_contradicts_nonempty_overt() {
        let x = CantorPoint::zeros();
        let machine = MonotoneMachine::accept_immediately();
        let overt =
            OvertSubset::from_points(vec![CantorPoint::eventually_constant(vec![true], false)]);
        let params = SpreenParams { budget: 1_000, scan_depth: 50, membership_fuel: 32 };
        let r = spreen_witness(&CantorSpace, &x, &machine, &overt, &params);
        assert!(matches!(r, Err(KlstError::ContradictionDetected { enumeration_index: 0 })));
    }

    #[test]
    fn spreen_premise_failure() {
        let x = CantorPoint::zeros();
        let r = spreen_witness(
            &CantorSpace,
            &x,
            &MonotoneMachine::never(),
            &OvertSubset::empty(),
            &SpreenParams { budget: 500, scan_depth: 10, membership_fuel: 16 },
        );
        assert!(matches!(r, Err(KlstError::PremiseFailed)));
    }

    #[test]
    fn spreen_witness_on_dyadic_reals() {
        // x = 0, S = "a ball within B(0, 1/2) observed", T = integers >= 1.
        let x = DyadicReal::exact(Dyadic::zero());
        let target = Ball { center: Dyadic::zero(), radius: d(1, 1) };
        let machine = MonotoneMachine::from_monotone_step(move |observed: &BTreeSet<u64>, _| {
            observed.iter().any(|&i| {
                crate::dyadic::formal_ball_inclusion(&decode_ball(i), &target)
            })
        });
        let overt = OvertSubset::new(|n| Some(DyadicReal::exact(Dyadic::from_int(n as i64 + 1))));
        let params = SpreenParams { budget: 400_000, scan_depth: 100, membership_fuel: 64 };
        let w = spreen_witness(&DyadicSpace, &x, &machine, &overt, &params).unwrap();
        assert!(!w.indices.is_empty());
        // Every witness ball contains 0 comfortably at exact precision.
        for &i in &w.indices {
            let b = decode_ball(i);
            assert!(b.center.abs() < b.radius);
        }
    }

    #[test]
    fn modulus_identity() {
        let e = parse_expr("x").unwrap();
        let x = DyadicReal::exact(Dyadic::zero());
        let eps = d(1, 3);
        let m = modulus(&e, &x, &eps, &ModulusParams::default()).unwrap();
        assert!(m.delta.is_positive());
        assert!(m.delta <= eps);
        let check = grid_check(&e, &x, &eps, &m.delta, 12);
        assert!(check.passed(), "{:?}", check.violations);
        assert!(check.points_checked > 0);
    }

    #[test]
    fn modulus_linear_contracts_delta() {
        let e = parse_expr("3*x").unwrap();
        let x = DyadicReal::exact(d(1, 2));
        let eps = d(1, 3);
        let m = modulus(&e, &x, &eps, &ModulusParams::default()).unwrap();
        assert!(m.delta.is_positive());
        // The Lipschitz bound: sound deltas are at most eps/3.
        let lipschitz_cap = Dyadic::one().div_floor(24, 10);
        assert!(m.delta <= lipschitz_cap, "delta {} too generous", m.delta);
        let check = grid_check(&e, &x, &eps, &m.delta, 12);
        assert!(check.passed(), "{:?}", check.violations);
    }

    #[test]
    fn modulus_abs_at_kink() {
        let e = parse_expr("abs(x)").unwrap();
        let x = DyadicReal::exact(Dyadic::zero());
        let eps = d(1, 2);
        let m = modulus(&e, &x, &eps, &ModulusParams::default()).unwrap();
        assert!(m.delta.is_positive());
        let check = grid_check(&e, &x, &eps, &m.delta, 12);
        assert!(check.passed(), "{:?}", check.violations);
    }

    #[test]
    fn modulus_of_nondyadic_point() {
        let e = parse_expr("x*x - x").unwrap();
        let x = DyadicReal::from_fraction(BigInt::from(1), BigInt::from(3)).unwrap();
        let eps = d(1, 3);
        let m = modulus(&e, &x, &eps, &ModulusParams::default()).unwrap();
        assert!(m.delta.is_positive());
        let check = grid_check(&e, &x, &eps, &m.delta, 12);
        assert!(check.passed(), "{:?}", check.violations);
    }
}
