//! Dyadic reals: fast Cauchy representatives with exact dyadic
//! approximations, and the countably based metric space over them.
//!
//! The dense sequence is the family of all dyadic rationals `m * 2^-j`,
//! indexed by `pair(zigzag(m), j)`. A base index codes a formal ball
//! `pair(center_index, radius_exponent)` with radius `2^-j`.

use super::{Enumeration, Space};
use crate::dyadic::{formal_ball_inclusion, Ball, Dyadic};
use crate::nat::{checked_pair, unpair, zigzag_decode, zigzag_encode};
use crate::sigma::{Lifted, Semi};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// A real number given by a fast Cauchy sequence of dyadic rationals:
/// `|approx(k) - approx(k')| <= 2^-k + 2^-k'`. Approximations are memoized
/// per point; the supplied function must be pure.
#[derive(Clone)]
pub struct DyadicReal {
    approx_fn: Arc<dyn Fn(u64) -> Dyadic + Send + Sync>,
    memo: Arc<Mutex<BTreeMap<u64, Dyadic>>>,
}

impl DyadicReal {
    pub fn from_fn(approx: impl Fn(u64) -> Dyadic + Send + Sync + 'static) -> Self {
        DyadicReal { approx_fn: Arc::new(approx), memo: Arc::new(Mutex::new(BTreeMap::new())) }
    }

    /// The constant representative of an exact dyadic rational.
    pub fn exact(value: Dyadic) -> Self {
        DyadicReal::from_fn(move |_| value.clone())
    }

    /// The real `numerator / denominator`, rounded at each precision; the
    /// rounding error `2^-(k+2)` keeps the fast Cauchy bound with room.
    pub fn from_fraction(numerator: BigInt, denominator: BigInt) -> Option<Self> {
        if denominator.is_zero() {
            return None;
        }
        let (num, den) = if denominator.is_negative() {
            (-numerator, -denominator)
        } else {
            (numerator, denominator)
        };
        Some(DyadicReal::from_fn(move |k| {
            // Round num/den to the nearest multiple of 2^-(k+1).
            let scaled: BigInt = &num << (k + 1);
            let twice: BigInt = (&scaled << 1) + &den;
            let m = twice.div_floor(&(&den << 1));
            Dyadic::new(m, -(k as i64 + 1))
        }))
    }

    pub fn approx(&self, k: u64) -> Dyadic {
        {
            let memo = self.memo.lock().unwrap();
            if let Some(d) = memo.get(&k) {
                return d.clone();
            }
        }
        let d = (self.approx_fn)(k);
        self.memo.lock().unwrap().insert(k, d.clone());
        d
    }
}

impl std::fmt::Debug for DyadicReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DyadicReal(~{})", self.approx(16))
    }
}

/// The `index`-th element of the dense sequence of dyadic rationals.
pub fn dense_point(index: u64) -> Dyadic {
    let (zz, j) = unpair(index);
    Dyadic::new(BigInt::from(zigzag_decode(zz)), -(j as i64))
}

/// An index of `d` in the dense sequence, when its mantissa fits.
pub fn dense_point_index(d: &Dyadic) -> Option<u64> {
    let j = (-d.exponent()).max(0) as u64;
    let m = d.numerator_at_scale(j as u32);
    let m64: i64 = m.try_into().ok()?;
    checked_pair(zigzag_encode(m64), j)
}

/// Decodes a base index into a formal ball `B(a_ci, 2^-j)`.
pub fn decode_ball(index: u64) -> Ball {
    let (ci, j) = unpair(index);
    Ball { center: dense_point(ci), radius: Dyadic::pow2(-(j as i64)) }
}

/// The base index of a formal ball, when the center lies in the dense
/// sequence at an encodable index and the radius is a power of two `<= 1`.
pub fn encode_ball(ball: &Ball) -> Option<u64> {
    let ci = dense_point_index(&ball.center)?;
    let r = &ball.radius;
    if r.mantissa() != &BigInt::from(1) || r.exponent() > 0 {
        return None;
    }
    checked_pair(ci, (-r.exponent()) as u64)
}

/// Membership of a represented real in a formal ball: accepts at fuel `f`
/// iff `|approx(k) - center| + 2^-k < radius` for some `k <= f`. Sound
/// because the true distance is within `2^-k` of the approximated one, and
/// complete for interior points by the Cauchy bound.
pub fn ball_member(x: &DyadicReal, center: &Dyadic, radius: &Dyadic) -> Semi {
    let x = x.clone();
    let center = center.clone();
    let radius = radius.clone();
    Semi::from_monotone_probe(move |f| {
        (0..=f).any(|k| {
            &(&x.approx(k) - &center).abs() + &Dyadic::pow2(-(k as i64)) < radius
        })
    })
}

/// The space of dyadic reals with the formal-ball base.
#[derive(Debug, Clone, Default)]
pub struct DyadicSpace;

impl Space for DyadicSpace {
    type Point = DyadicReal;

    fn base_member(&self, index: u64, point: &DyadicReal) -> Semi {
        let ball = decode_ball(index);
        ball_member(point, &ball.center, &ball.radius)
    }

    fn base_refine(&self, i: u64, j: u64, point: &DyadicReal) -> Lifted<u64> {
        let bi = decode_ball(i);
        let bj = decode_ball(j);
        let x = point.clone();
        Lifted::from_stable_probe(move |fuel| {
            for t in 0..=fuel {
                let (g, inner) = unpair(t);
                let Some(candidate) = approximation_ball(&x, g) else { continue };
                if formal_ball_inclusion(&candidate, &bi)
                    && formal_ball_inclusion(&candidate, &bj)
                    && ball_member(&x, &candidate.center, &candidate.radius).probe(inner)
                {
                    return encode_ball(&candidate);
                }
            }
            None
        })
    }

    fn nbh_enumerate(&self, point: &DyadicReal) -> Enumeration {
        // Even positions: the generic dovetail, which eventually reaches
        // every accepting ball. Odd positions: balls read off the point's own
        // approximations, which reach useful precision exponentially sooner;
        // each is verified before being emitted, so the enumerated set is
        // still exactly the neighborhood filter.
        let space = self.clone();
        let x = point.clone();
        let memo: Mutex<HashMap<u64, Semi>> = Mutex::new(HashMap::new());
        Enumeration::new(move |n| {
            if n % 2 == 0 {
                let (i, f) = unpair(n / 2);
                let semi = {
                    let mut memo = memo.lock().unwrap();
                    memo.entry(i).or_insert_with(|| space.base_member(i, &x)).clone()
                };
                if semi.probe(f) {
                    Some(i)
                } else {
                    None
                }
            } else {
                let g = (n - 1) / 2;
                let candidate = approximation_ball(&x, g)?;
                let code = encode_ball(&candidate)?;
                ball_member(&x, &candidate.center, &candidate.radius)
                    .probe(g + 4)
                    .then_some(code)
            }
        })
    }
}

/// The radius-`2^-g` ball centered on the point's precision-`(g+2)`
/// approximation; it always contains the point, with acceptance by fuel
/// `g + 3`.
fn approximation_ball(x: &DyadicReal, g: u64) -> Option<Ball> {
    let center = x.approx(g + 2);
    // Keep centers with enormous mantissas out of the dense coding.
    if center.mantissa().bits() > 48 {
        return None;
    }
    Some(Ball { center, radius: Dyadic::pow2(-(g as i64)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::{markov_run, MarkovOutcome};

    fn third() -> DyadicReal {
        DyadicReal::from_fraction(BigInt::from(1), BigInt::from(3)).unwrap()
    }

    #[test]
    fn fraction_approximations_are_fast_cauchy() {
        let x = third();
        for k in 0..12u64 {
            for k2 in 0..12u64 {
                let bound = &Dyadic::pow2(-(k as i64)) + &Dyadic::pow2(-(k2 as i64));
                let diff = (&x.approx(k) - &x.approx(k2)).abs();
                assert!(diff <= bound, "k={k} k2={k2}");
            }
        }
    }

    #[test]
    fn ball_membership_examples() {
        let zero = DyadicReal::exact(Dyadic::zero());
        // x = 0 in B(0, 1): accepted at fuel 1 (0 + 1/2 < 1).
        let s = ball_member(&zero, &Dyadic::zero(), &Dyadic::one());
        assert!(!s.probe(0));
        assert!(s.probe(1));
        // x = 1 is not in B(0, 1).
        let one = DyadicReal::exact(Dyadic::one());
        assert!(!ball_member(&one, &Dyadic::zero(), &Dyadic::one()).probe(2000));
        // Boundary: x = 1/2 is not strictly inside B(0, 1/2).
        let half = DyadicReal::exact(Dyadic::from_fraction_pow2(1, 1));
        assert!(!ball_member(&half, &Dyadic::zero(), &Dyadic::from_fraction_pow2(1, 1)).probe(2000));
    }

    #[test]
    fn one_third_is_in_the_quarter_ball() {
        // |1/3 - 1/4| = 1/12 < 1/4, so the ball B(1/4, 1/4) is a neighborhood.
        let x = third();
        let s = ball_member(&x, &Dyadic::from_fraction_pow2(1, 2), &Dyadic::from_fraction_pow2(1, 2));
        assert!(matches!(markov_run(&s, 100), MarkovOutcome::Accepted { .. }));
    }

    #[test]
    fn dense_sequence_round_trips() {
        for i in 0..500u64 {
            let d = dense_point(i);
            let j = dense_point_index(&d).unwrap();
            assert_eq!(dense_point(j), d);
        }
    }

    #[test]
    fn nbh_emits_only_true_neighborhoods_and_reaches_fine_balls() {
        let x = third();
        let e = DyadicSpace.nbh_enumerate(&x);
        let mut finest: Option<Dyadic> = None;
        for n in 0..2000u64 {
            if let Some(code) = e.at(n) {
                let ball = decode_ball(code);
                // Soundness: x really is inside, checked with slack.
                let approx = x.approx(20);
                let dist = (&approx - &ball.center).abs();
                assert!(&dist - &Dyadic::pow2(-20) < ball.radius);
                let r = ball.radius.clone();
                finest = Some(match finest {
                    None => r,
                    Some(prev) => prev.min(r),
                });
            }
        }
        let finest = finest.expect("some neighborhood enumerated");
        assert!(finest <= Dyadic::pow2(-8), "finest radius reached: {finest}");
    }

    #[test]
    fn refine_finds_a_common_ball() {
        let x = third();
        // Both balls contain 1/3: B(1/4, 1/4) and B(1/2, 1/4).
        let i = encode_ball(&Ball {
            center: Dyadic::from_fraction_pow2(1, 2),
            radius: Dyadic::from_fraction_pow2(1, 2),
        })
        .unwrap();
        let j = encode_ball(&Ball {
            center: Dyadic::from_fraction_pow2(1, 1),
            radius: Dyadic::from_fraction_pow2(1, 2),
        })
        .unwrap();
        let k = DyadicSpace
            .base_refine(i, j, &x)
            .probe(5000)
            .expect("refinement should resolve");
        let b = decode_ball(k);
        assert!(formal_ball_inclusion(&b, &decode_ball(i)));
        assert!(formal_ball_inclusion(&b, &decode_ball(j)));
        assert!(ball_member(&x, &b.center, &b.radius).probe(64));
    }
}
