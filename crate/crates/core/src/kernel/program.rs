//! Register-machine programs: four instruction kinds, absolute jump targets,
//! input in register 0.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Registers are addressed by small naturals.
pub const MAX_REGISTERS: u16 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instruction {
    /// Increment a register.
    Inc { reg: u16 },
    /// If the register is zero, jump to `target`; otherwise decrement it and
    /// fall through.
    DecJz { reg: u16, target: u32 },
    /// Unconditional jump.
    Jmp { target: u32 },
    /// Halt with the value of `reg` as output.
    Halt { reg: u16 },
}

impl Instruction {
    pub fn registers(&self) -> Option<u16> {
        match self {
            Instruction::Inc { reg } | Instruction::DecJz { reg, .. } | Instruction::Halt { reg } => {
                Some(*reg)
            }
            Instruction::Jmp { .. } => None,
        }
    }

    pub fn target(&self) -> Option<u32> {
        match self {
            Instruction::DecJz { target, .. } | Instruction::Jmp { target } => Some(*target),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("instruction {index}: jump target {target} exceeds program length {len}")]
    TargetOutOfBounds { index: usize, target: u32, len: usize },
    #[error("instruction {index}: register {reg} exceeds the register limit {MAX_REGISTERS}")]
    RegisterTooLarge { index: usize, reg: u16 },
}

/// A validated instruction list. Jump targets are within bounds or equal to
/// the instruction count; jumping to the count halts (see [`crate::kernel::run`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, ProgramError> {
        let len = instructions.len();
        for (index, inst) in instructions.iter().enumerate() {
            if let Some(reg) = inst.registers() {
                if reg >= MAX_REGISTERS {
                    return Err(ProgramError::RegisterTooLarge { index, reg });
                }
            }
            if let Some(target) = inst.target() {
                if target as usize > len {
                    return Err(ProgramError::TargetOutOfBounds { index, target, len });
                }
            }
        }
        Ok(Program { instructions })
    }

    /// The canonical everywhere-diverging program: a single self-jump.
    pub fn diverging() -> Self {
        Program { instructions: vec![Instruction::Jmp { target: 0 }] }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Largest register index mentioned, if any.
    pub fn max_register(&self) -> Option<u16> {
        self.instructions.iter().filter_map(Instruction::registers).max()
    }
}

impl fmt::Display for Program {
    /// Renders in the textual program format accepted by the parser, with a
    /// label on every jump target.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use std::collections::BTreeSet;
        let targets: BTreeSet<u32> = self.instructions.iter().filter_map(Instruction::target).collect();
        for (i, inst) in self.instructions.iter().enumerate() {
            if targets.contains(&(i as u32)) {
                write!(f, "L{i}: ")?;
            }
            match inst {
                Instruction::Inc { reg } => writeln!(f, "INC {reg}")?,
                Instruction::DecJz { reg, target } => writeln!(f, "DECJZ {reg} L{target}")?,
                Instruction::Jmp { target } => writeln!(f, "JMP L{target}")?,
                Instruction::Halt { reg } => writeln!(f, "HALT {reg}")?,
            }
        }
        if targets.contains(&(self.instructions.len() as u32)) {
            writeln!(f, "L{}:", self.instructions.len())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Program::new(vec![Instruction::Jmp { target: 2 }]).is_err());
        // Target equal to the length is allowed: falling off the end halts.
        assert!(Program::new(vec![Instruction::Jmp { target: 1 }]).is_ok());
        assert!(Program::new(vec![Instruction::Inc { reg: MAX_REGISTERS }]).is_err());
    }

    #[test]
    fn display_labels_targets() {
        let p = Program::new(vec![
            Instruction::DecJz { reg: 0, target: 2 },
            Instruction::Jmp { target: 0 },
            Instruction::Halt { reg: 1 },
        ])
        .unwrap();
        let text = p.to_string();
        assert!(text.contains("L0: DECJZ 0 L2"));
        assert!(text.contains("L2: HALT 1"));
    }
}
