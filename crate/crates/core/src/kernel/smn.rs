//! The s-m-n transformation, by code generation: the emitted program
//! recombines its runtime input with the frozen argument through the pairing
//! function, then runs the original body.

use super::codes::{decode, emit_constant, encode};
use super::program::{Instruction, Program};
use num_bigint::BigUint;

/// Specializes program `k` on first argument `x`: for all `y`, fuel-bounded
/// runs of `smn(k, x)` on `y` agree, on halting and value, with runs of `k`
/// on `pair(x, y)`, up to the fuel overhead of the generated prefix.
pub fn smn(k: &BigUint, x: u64) -> BigUint {
    let body = decode(k);
    encode(&specialize(&body, x))
}

/// The program-level version of [`smn`].
pub fn specialize(body: &Program, x: u64) -> Program {
    // Scratch registers sit above anything the body touches.
    let base = body.max_register().map(|r| r + 1).unwrap_or(1).max(1);
    let (a, b, c, d) = (base, base + 1, base + 2, base + 3);

    // Phase 1: build the constant x into A (scratch B).
    let mut prefix = emit_constant(&BigUint::from(x), a, b, 0);
    let p0 = prefix.len() as u32;

    // Phase 2: with y in r0, compute pair(x, y) = T(x + y) + y into r0.
    // Entry state: A = x, B = C = D = 0.
    #[rustfmt::skip]
    prefix.extend_from_slice(&[
        // Move y: r0 -> A (sum) and B (copy of y).
        Instruction::DecJz { reg: 0, target: p0 + 4 },
        Instruction::Inc { reg: a },
        Instruction::Inc { reg: b },
        Instruction::Jmp { target: p0 },
        // Triangle number of A into r0, counting i upward in C via D.
        Instruction::DecJz { reg: a, target: p0 + 13 },
        Instruction::Inc { reg: c },
        Instruction::DecJz { reg: c, target: p0 + 10 },
        Instruction::Inc { reg: 0 },
        Instruction::Inc { reg: d },
        Instruction::Jmp { target: p0 + 6 },
        Instruction::DecJz { reg: d, target: p0 + 4 },
        Instruction::Inc { reg: c },
        Instruction::Jmp { target: p0 + 10 },
        // Add y back: B -> r0.
        Instruction::DecJz { reg: b, target: p0 + 16 },
        Instruction::Inc { reg: 0 },
        Instruction::Jmp { target: p0 + 13 },
        // Zero the leftover sum in C.
        Instruction::DecJz { reg: c, target: p0 + 18 },
        Instruction::Jmp { target: p0 + 16 },
    ]);

    let shift = prefix.len() as u32;
    let mut instructions = prefix;
    for inst in body.instructions() {
        instructions.push(match *inst {
            Instruction::DecJz { reg, target } => Instruction::DecJz { reg, target: target + shift },
            Instruction::Jmp { target } => Instruction::Jmp { target: target + shift },
            other => other,
        });
    }
    Program::new(instructions).expect("specialization preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::machine::{run, RunOutcome};
    use crate::kernel::samples;
    use crate::nat::pair;

    const FUEL: u64 = 100_000;

    #[test]
    fn smn_of_addition() {
        let k_add = encode(&samples::add_unpaired());
        let s = smn(&k_add, 3);
        match run(&decode(&s), 4, FUEL) {
            RunOutcome::Halted { output, .. } => assert_eq!(output, 7),
            RunOutcome::StillRunning => panic!("specialized addition did not halt"),
        }
        // Oracle: the unspecialized program on the paired input.
        assert_eq!(run(&samples::add_unpaired(), pair(3, 4), FUEL).output(), Some(7));
    }

    #[test]
    fn smn_of_diverging_diverges() {
        let k = encode(&samples::loop_forever());
        let s = smn(&k, 5);
        for y in [0u64, 1, 17] {
            assert_eq!(run(&decode(&s), y, 50_000), RunOutcome::StillRunning);
        }
    }

    #[test]
    fn smn_law_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x5a5a);
        let programs =
            [samples::add_unpaired(), samples::identity(), samples::successor(), samples::loop_forever()];
        for _ in 0..20 {
            let body = &programs[rng.gen_range(0..programs.len())];
            let k = encode(body);
            let x = rng.gen_range(0..40u64);
            let y = rng.gen_range(0..40u64);
            let direct = run(body, pair(x, y), FUEL);
            let specialized = run(&decode(&smn(&k, x)), y, FUEL);
            match direct {
                RunOutcome::Halted { output, .. } => {
                    assert_eq!(specialized.output(), Some(output), "x={x} y={y}");
                }
                RunOutcome::StillRunning => {
                    assert_eq!(specialized, RunOutcome::StillRunning, "x={x} y={y}");
                }
            }
        }
    }
}
