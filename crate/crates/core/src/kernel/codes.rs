//! Goedel numbering of programs.
//!
//! A code splits as `pair(tag, payload)`. Tag 0 carries a plain program as a
//! little-endian base-16 digit stream (one self-delimiting group per
//! instruction, closed by a sentinel digit), so code size is linear in
//! program size. Tag 1 is the self-output family: `pair(1, m)` decodes to a
//! program that ignores its input and outputs `pair(1, m)` itself — every
//! tag-1 code is its own quine. All other codes, and all malformed digit
//! streams, decode to the canonical diverging program, which keeps `decode`
//! total: any natural can be run on any input.
//!
//! The numbering is one acceptable choice among many; only behavior is
//! stable across implementations, not code values.

use super::program::{Instruction, Program, MAX_REGISTERS};
use crate::nat::{big_pair, big_unpair};
use num_bigint::BigUint;
use num_traits::{One, Zero};

const RADIX: u32 = 16;

fn push_varint(digits: &mut Vec<u8>, mut v: u64) {
    while v >= 8 {
        digits.push(8 | (v & 7) as u8);
        v >>= 3;
    }
    digits.push(v as u8);
}

fn read_varint(digits: &[u8], pos: &mut usize) -> Option<u64> {
    let mut value = 0u64;
    let mut shift = 0u32;
    loop {
        let d = *digits.get(*pos)?;
        *pos += 1;
        if shift >= 63 {
            return None;
        }
        value |= ((d & 7) as u64) << shift;
        if d < 8 {
            return Some(value);
        }
        shift += 3;
    }
}

/// Encodes a program as a natural. Total, and inverted exactly by [`decode`].
pub fn encode(program: &Program) -> BigUint {
    let mut digits: Vec<u8> = Vec::new();
    for inst in program.instructions() {
        match *inst {
            Instruction::Inc { reg } => {
                digits.push(0);
                push_varint(&mut digits, reg as u64);
            }
            Instruction::DecJz { reg, target } => {
                digits.push(1);
                push_varint(&mut digits, reg as u64);
                push_varint(&mut digits, target as u64);
            }
            Instruction::Jmp { target } => {
                digits.push(2);
                push_varint(&mut digits, target as u64);
            }
            Instruction::Halt { reg } => {
                digits.push(3);
                push_varint(&mut digits, reg as u64);
            }
        }
    }
    // Sentinel top digit so trailing zero digits survive the numeric value.
    digits.push(1);
    big_pair(&BigUint::zero(), &BigUint::from_radix_le(&digits, RADIX).unwrap())
}

fn decode_plain(payload: &BigUint) -> Option<Program> {
    if payload.is_zero() {
        return None;
    }
    let mut digits = payload.to_radix_le(RADIX as u32);
    if digits.pop() != Some(1) {
        return None;
    }
    let mut instructions = Vec::new();
    let mut pos = 0usize;
    while pos < digits.len() {
        let lead = digits[pos];
        pos += 1;
        let inst = match lead {
            0 => Instruction::Inc { reg: read_reg(&digits, &mut pos)? },
            1 => {
                let reg = read_reg(&digits, &mut pos)?;
                let target = read_target(&digits, &mut pos)?;
                Instruction::DecJz { reg, target }
            }
            2 => Instruction::Jmp { target: read_target(&digits, &mut pos)? },
            3 => Instruction::Halt { reg: read_reg(&digits, &mut pos)? },
            _ => return None,
        };
        instructions.push(inst);
    }
    Program::new(instructions).ok()
}

fn read_reg(digits: &[u8], pos: &mut usize) -> Option<u16> {
    let v = read_varint(digits, pos)?;
    if v < MAX_REGISTERS as u64 {
        Some(v as u16)
    } else {
        None
    }
}

fn read_target(digits: &[u8], pos: &mut usize) -> Option<u32> {
    u32::try_from(read_varint(digits, pos)?).ok()
}

/// Decodes any natural to a program. Invalid codes yield the canonical
/// diverging program.
pub fn decode(code: &BigUint) -> Program {
    let (tag, payload) = big_unpair(code);
    if tag.is_zero() {
        decode_plain(&payload).unwrap_or_else(Program::diverging)
    } else if tag.is_one() {
        self_output_program(code)
    } else {
        Program::diverging()
    }
}

/// The program behind a tag-1 code: build the code itself in register 1 and
/// halt with it.
fn self_output_program(code: &BigUint) -> Program {
    let mut instructions = emit_constant(code, 1, 2, 0);
    instructions.push(Instruction::Halt { reg: 1 });
    Program::new(instructions).expect("constant builder emits valid code")
}

/// The code of the self-output program carrying payload `m`.
pub fn self_output_code(m: &BigUint) -> BigUint {
    big_pair(&BigUint::one(), m)
}

/// Emits instructions that add the constant `v` to `target_reg` (which the
/// caller guarantees holds zero), using `scratch_reg` as zeroed scratch.
/// Binary method: O(log v) instructions, O(v) run time. `offset` is the
/// absolute index at which these instructions will sit, for jump targets.
pub fn emit_constant(v: &BigUint, target_reg: u16, scratch_reg: u16, offset: u32) -> Vec<Instruction> {
    let mut out: Vec<Instruction> = Vec::new();
    if v.is_zero() {
        return out;
    }
    let bits = v.bits();
    // Most significant bit first.
    for i in (0..bits).rev() {
        if i + 1 < bits {
            emit_double(&mut out, target_reg, scratch_reg, offset);
        }
        if v.bit(i) {
            out.push(Instruction::Inc { reg: target_reg });
        }
    }
    out
}

/// target := 2 * target, via scratch. Seven instructions.
fn emit_double(out: &mut Vec<Instruction>, target: u16, scratch: u16, offset: u32) {
    let base = offset + out.len() as u32;
    out.extend_from_slice(&[
        Instruction::DecJz { reg: target, target: base + 4 },
        Instruction::Inc { reg: scratch },
        Instruction::Inc { reg: scratch },
        Instruction::Jmp { target: base },
        Instruction::DecJz { reg: scratch, target: base + 7 },
        Instruction::Inc { reg: target },
        Instruction::Jmp { target: base + 4 },
    ]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::machine::{run, RunOutcome};
    use crate::kernel::samples;
    use crate::nat::to_u64;

    #[test]
    fn encode_decode_round_trip() {
        for p in [
            samples::identity(),
            samples::successor(),
            samples::loop_forever(),
            samples::add_unpaired(),
            Program::new(vec![]).unwrap(),
        ] {
            assert_eq!(decode(&encode(&p)).instructions(), p.instructions());
        }
    }

    #[test]
    fn decode_total_on_small_codes() {
        // Every code decodes; re-encoding the result is a fixed point of
        // decode on the instruction list.
        for n in 0u64..10_000 {
            let code = BigUint::from(n);
            let p = decode(&code);
            let p2 = decode(&encode(&p));
            assert_eq!(p.instructions(), p2.instructions(), "code {n}");
        }
    }

    #[test]
    fn decode_zero_is_valid() {
        let p = decode(&BigUint::zero());
        assert!(!p.is_empty());
    }

    #[test]
    fn constant_builder_builds() {
        for v in [0u64, 1, 2, 3, 7, 12, 100, 1000] {
            let mut insts = emit_constant(&BigUint::from(v), 1, 2, 0);
            insts.push(Instruction::Halt { reg: 1 });
            let p = Program::new(insts).unwrap();
            match run(&p, 0, 20 * v + 100) {
                RunOutcome::Halted { output, .. } => assert_eq!(output, v),
                RunOutcome::StillRunning => panic!("constant builder for {v} ran out of fuel"),
            }
        }
    }

    #[test]
    fn self_output_codes_are_quines() {
        for m in 0u64..5 {
            let code = self_output_code(&BigUint::from(m));
            let p = decode(&code);
            let small = to_u64(&code).unwrap();
            match run(&p, 99, 30 * small + 100) {
                RunOutcome::Halted { output, .. } => assert_eq!(BigUint::from(output), code),
                RunOutcome::StillRunning => panic!("self-output program did not halt"),
            }
        }
    }
}
