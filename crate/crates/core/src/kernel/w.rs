//! The fixed enumeration of computably enumerable subsets of the naturals:
//! `W_k` is the halting set of the `k`-th program.

use super::codes::decode;
use super::machine::run;
use crate::sigma::Semi;
use num_bigint::BigUint;
use std::sync::Arc;

/// A computably enumerable set, presented by a program code. Membership of
/// `n` is reported true at some fuel iff the indexed program halts on `n`.
#[derive(Clone)]
pub struct CeSet {
    index: BigUint,
    program: Arc<super::Program>,
}

impl CeSet {
    pub fn new(index: BigUint) -> Self {
        let program = Arc::new(decode(&index));
        CeSet { index, program }
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    /// The membership semidecider for `n`.
    pub fn member(&self, n: u64) -> Semi {
        let program = self.program.clone();
        Semi::from_monotone_probe(move |fuel| run(&program, n, fuel).halted())
    }
}

/// Free-function form of [`CeSet::member`].
pub fn w_member(s: &CeSet, n: u64) -> Semi {
    s.member(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::codes::encode;
    use crate::kernel::samples;
    use crate::sigma::{markov_run, MarkovOutcome};

    #[test]
    fn always_halting_program_accepts() {
        let s = CeSet::new(encode(&samples::identity()));
        assert!(matches!(markov_run(&s.member(5), 100), MarkovOutcome::Accepted { .. }));
    }

    #[test]
    fn never_halting_program_rejects_at_every_tested_fuel() {
        let s = CeSet::new(encode(&samples::loop_forever()));
        assert_eq!(markov_run(&s.member(5), 10_000), MarkovOutcome::BudgetExhausted);
    }

    #[test]
    fn membership_agrees_with_run_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let fuel = 10_000u64;
        for _ in 0..50 {
            let index = BigUint::from(rng.gen_range(0..5000u64));
            let n = rng.gen_range(0..50u64);
            let set = CeSet::new(index.clone());
            let direct = run(&decode(&index), n, fuel).halted();
            assert_eq!(set.member(n).probe(fuel), direct, "index {index}, n {n}");
        }
    }
}
