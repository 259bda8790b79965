//! The fuel-bounded evaluator. Fuel is machine steps, exactly, so every
//! trace is deterministic and reproducible.

use super::program::{Instruction, Program};

/// A machine configuration: program counter, registers, and steps consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    pub pc: u32,
    pub registers: Vec<u64>,
    pub steps: u64,
}

impl MachineState {
    pub fn initial(input: u64) -> Self {
        MachineState { pc: 0, registers: vec![input], steps: 0 }
    }

    fn reg(&self, r: u16) -> u64 {
        self.registers.get(r as usize).copied().unwrap_or(0)
    }

    fn reg_mut(&mut self, r: u16) -> &mut u64 {
        if self.registers.len() <= r as usize {
            self.registers.resize(r as usize + 1, 0);
        }
        &mut self.registers[r as usize]
    }
}

/// Result of a fuel-bounded run. Divergence is the `StillRunning` value,
/// never an exception.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: u64, steps: u64 },
    StillRunning,
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }

    pub fn output(&self) -> Option<u64> {
        match self {
            RunOutcome::Halted { output, .. } => Some(*output),
            RunOutcome::StillRunning => None,
        }
    }
}

/// Executes one instruction. Returns the output value if the machine halted
/// on this step.
fn step(program: &Program, state: &mut MachineState) -> Option<u64> {
    let inst = program.instructions()[state.pc as usize];
    state.steps += 1;
    match inst {
        Instruction::Inc { reg } => {
            let r = state.reg_mut(reg);
            *r = r.saturating_add(1);
            state.pc += 1;
            None
        }
        Instruction::DecJz { reg, target } => {
            if state.reg(reg) == 0 {
                state.pc = target;
            } else {
                *state.reg_mut(reg) -= 1;
                state.pc += 1;
            }
            None
        }
        Instruction::Jmp { target } => {
            state.pc = target;
            None
        }
        Instruction::Halt { reg } => Some(state.reg(reg)),
    }
}

/// Runs `program` on `input` (placed in register 0) for at most `fuel`
/// steps. Reaching the instruction count without executing a halt also
/// halts, with register 0 as the output, so the empty program is the
/// identity function.
///
/// Monotone in fuel: a result at fuel `f` is returned identically at every
/// fuel `>= f`.
pub fn run(program: &Program, input: u64, fuel: u64) -> RunOutcome {
    let mut state = MachineState::initial(input);
    run_from(program, &mut state, fuel)
}

/// Continues a run from an existing state; used by tests that inspect
/// intermediate configurations.
pub fn run_from(program: &Program, state: &mut MachineState, fuel: u64) -> RunOutcome {
    let len = program.len() as u32;
    loop {
        if state.pc >= len {
            return RunOutcome::Halted { output: state.reg(0), steps: state.steps };
        }
        if state.steps >= fuel {
            return RunOutcome::StillRunning;
        }
        if let Some(output) = step(program, state) {
            return RunOutcome::Halted { output, steps: state.steps };
        }
    }
}
