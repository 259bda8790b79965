//! Fixed points of program transformers.
//!
//! Given a total transformer of codes, [`kleene_fixed_point`] searches for a
//! code `n` whose program is extensionally equal to the program of `f(n)`,
//! certifying the claim by fuel-bounded comparison on sample inputs. The
//! candidate stream leads with the self-output codes — each already outputs
//! its own code, so it is a ready-made fixed point for any transformer that
//! preserves or constructs constant-output behavior — followed by the orbit
//! of `f` itself, which catches transformers that stabilize syntactically.

use super::codes::{decode, self_output_code};
use super::machine::run;
use super::KernelError;
use num_bigint::BigUint;
use num_traits::Zero;

/// A total transformation of program codes. The fuel bound applies to
/// transformers that are themselves programs; host-level transformers may
/// ignore it.
pub trait CodeTransformer {
    fn transform(&self, code: &BigUint, fuel: u64) -> Result<BigUint, KernelError>;
}

impl<F: Fn(&BigUint) -> BigUint> CodeTransformer for F {
    fn transform(&self, code: &BigUint, _fuel: u64) -> Result<BigUint, KernelError> {
        Ok(self(code))
    }
}

/// A transformer given as machine code: the program receives the input code
/// in register 0 and must halt with the output code.
pub struct ProgramTransformer {
    pub program: super::Program,
}

impl CodeTransformer for ProgramTransformer {
    fn transform(&self, code: &BigUint, fuel: u64) -> Result<BigUint, KernelError> {
        let input = crate::nat::to_u64(code).ok_or(KernelError::CodeTooLarge)?;
        match run(&self.program, input, fuel) {
            super::RunOutcome::Halted { output, .. } => Ok(BigUint::from(output)),
            super::RunOutcome::StillRunning => Err(KernelError::BudgetExhausted { budget: fuel }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointConfig {
    /// Fuel granted to each transformer application.
    pub transform_fuel: u64,
    /// Fuel for each side of the extensional comparison.
    pub verify_fuel: u64,
    /// Inputs 0..verify_inputs are compared.
    pub verify_inputs: u64,
    /// How many candidates to try before giving up.
    pub max_candidates: u64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            transform_fuel: 100_000,
            verify_fuel: 100_000,
            verify_inputs: 10,
            max_candidates: 64,
        }
    }
}

/// Orbit codes can grow multiplicatively under code-expanding transformers;
/// candidates beyond this bit length are dropped rather than transformed.
const MAX_CANDIDATE_BITS: u64 = 50_000;

/// Returns a code `n` with the programs of `n` and `f(n)` extensionally
/// equal, as certified by fuel-bounded comparison on the configured sample
/// inputs. Transformer failures on a candidate propagate; exhausting the
/// candidate stream reports `NoFixedPointFound`.
pub fn kleene_fixed_point(
    f: &dyn CodeTransformer,
    config: &FixedPointConfig,
) -> Result<BigUint, KernelError> {
    let mut orbit = Some(self_output_code(&BigUint::zero()));
    for i in 0..config.max_candidates {
        let candidate = if i % 2 == 0 {
            self_output_code(&BigUint::from(i / 2))
        } else {
            match orbit.take() {
                Some(prev) => {
                    let next = f.transform(&prev, config.transform_fuel)?;
                    if next.bits() <= MAX_CANDIDATE_BITS {
                        orbit = Some(next.clone());
                        next
                    } else {
                        continue;
                    }
                }
                None => continue,
            }
        };
        let image = f.transform(&candidate, config.transform_fuel)?;
        if extensionally_agree(&candidate, &image, config.verify_inputs, config.verify_fuel) {
            return Ok(candidate);
        }
    }
    Err(KernelError::NoFixedPointFound { candidates: config.max_candidates })
}

/// Fuel-bounded extensional comparison of two codes on inputs
/// `0..inputs`: both halt with the same value, or neither halts in time.
pub fn extensionally_agree(a: &BigUint, b: &BigUint, inputs: u64, fuel: u64) -> bool {
    let pa = decode(a);
    let pb = decode(b);
    (0..inputs).all(|i| run(&pa, i, fuel).output() == run(&pb, i, fuel).output())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::codes::encode;
    use crate::kernel::program::{Instruction, Program};
    use crate::kernel::RunOutcome;

    fn cfg() -> FixedPointConfig {
        FixedPointConfig::default()
    }

    #[test]
    fn identity_transformer_fixed_immediately() {
        let f = |c: &BigUint| c.clone();
        let n = kleene_fixed_point(&f, &cfg()).unwrap();
        assert!(extensionally_agree(&n, &n, 10, 100_000));
    }

    #[test]
    fn prepend_noop_transformer() {
        // Prepend an increment of a register nobody reads, shifting all jump
        // targets to keep behavior identical.
        let f = |c: &BigUint| {
            let p = decode(c);
            let spare = p.max_register().map(|r| r + 1).unwrap_or(1);
            let mut insts = vec![Instruction::Inc { reg: spare }];
            for inst in p.instructions() {
                insts.push(match *inst {
                    Instruction::DecJz { reg, target } => Instruction::DecJz { reg, target: target + 1 },
                    Instruction::Jmp { target } => Instruction::Jmp { target: target + 1 },
                    other => other,
                });
            }
            encode(&Program::new(insts).unwrap())
        };
        let n = kleene_fixed_point(&f, &cfg()).unwrap();
        let fn_ = f(&n);
        for i in 0..10 {
            assert_eq!(
                run(&decode(&n), i, 100_000).output(),
                run(&decode(&fn_), i, 100_000).output(),
                "disagree at input {i}"
            );
        }
    }

    #[test]
    fn quine_from_constant_output_transformer() {
        // f maps any code m to the code of a program that outputs the
        // constant m; a fixed point must therefore print its own code.
        let f = |c: &BigUint| {
            let mut insts =
                crate::kernel::codes::emit_constant(c, 1, 2, 0);
            insts.push(Instruction::Halt { reg: 1 });
            encode(&Program::new(insts).unwrap())
        };
        let n = kleene_fixed_point(&f, &cfg()).unwrap();
        match run(&decode(&n), 0, 100_000) {
            RunOutcome::Halted { output, .. } => assert_eq!(BigUint::from(output), n),
            RunOutcome::StillRunning => panic!("quine did not halt"),
        }
    }

    #[test]
    fn adversarial_transformer_reports_failure() {
        // "Output one more than your own code, mod 997" admits no extensional
        // fixed point among the candidates, and the constants stay small
        // enough that every comparison actually halts within fuel.
        let f = |c: &BigUint| {
            let v = (c + 1u32) % BigUint::from(997u32);
            let mut insts = crate::kernel::codes::emit_constant(&v, 1, 2, 0);
            insts.push(Instruction::Halt { reg: 1 });
            encode(&Program::new(insts).unwrap())
        };
        let result = kleene_fixed_point(&f, &FixedPointConfig { max_candidates: 8, ..cfg() });
        assert!(matches!(result, Err(KernelError::NoFixedPointFound { .. })));
    }
}
