//! Hand-assembled programs used in tests, documentation, and the CLI.

use super::program::{Instruction, Program};

/// Halts immediately with the input: `HALT 0`.
pub fn identity() -> Program {
    Program::new(vec![Instruction::Halt { reg: 0 }]).unwrap()
}

/// Adds one to the input.
pub fn successor() -> Program {
    Program::new(vec![Instruction::Inc { reg: 0 }, Instruction::Halt { reg: 0 }]).unwrap()
}

/// A single self-jump: diverges on every input.
pub fn loop_forever() -> Program {
    Program::diverging()
}

/// On input `pair(a, b)`, outputs `a + b`.
///
/// `pair(a, b) = T(s) + b` with `s = a + b` and `T` the triangle numbers, so
/// the sum is recovered by subtracting 1, 2, 3, ... from the input while
/// possible. Register use: 0 input, 1 the diagonal counter (output), 2 the
/// current subtrahend, 3 copy scratch.
pub fn add_unpaired() -> Program {
    use Instruction::*;
    #[rustfmt::skip]
    let instructions = vec![
        /*  0 */ Inc { reg: 2 },                       // r2 := s + 1, start from r1 = s
        /*  1 */ DecJz { reg: 1, target: 5 },          //   copy r1 into r3 and r2
        /*  2 */ Inc { reg: 3 },
        /*  3 */ Inc { reg: 2 },
        /*  4 */ Jmp { target: 1 },
        /*  5 */ DecJz { reg: 3, target: 8 },          //   restore r1 from r3
        /*  6 */ Inc { reg: 1 },
        /*  7 */ Jmp { target: 5 },
        /*  8 */ DecJz { reg: 2, target: 11 },         // subtract r2 from r0
        /*  9 */ DecJz { reg: 0, target: 13 },         //   input exhausted: output r1
        /* 10 */ Jmp { target: 8 },
        /* 11 */ Inc { reg: 1 },                       // full subtraction: next diagonal
        /* 12 */ Jmp { target: 0 },
        /* 13 */ Halt { reg: 1 },
    ];
    Program::new(instructions).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::machine::run;
    use crate::nat::pair;

    #[test]
    fn add_unpaired_is_addition() {
        let p = add_unpaired();
        for (a, b) in [(0, 0), (0, 3), (3, 0), (7, 5), (20, 20), (1, 40)] {
            assert_eq!(run(&p, pair(a, b), 100_000).output(), Some(a + b), "{a}+{b}");
        }
    }
}
