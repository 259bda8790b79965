//! A minimal universe of partial computable functions over the naturals:
//! a Minsky-style register machine with a total Goedel numbering, fuel-exact
//! evaluation, s-m-n by code generation, a fixed enumeration of
//! computably enumerable sets, and fixed points of program transformers.

mod codes;
mod machine;
mod parse;
mod program;
mod recursion;
pub mod samples;
mod smn;
mod w;

pub use codes::{decode, emit_constant, encode, self_output_code};
pub use machine::{run, run_from, MachineState, RunOutcome};
pub use parse::{parse_program, ParseError};
pub use program::{Instruction, Program, ProgramError, MAX_REGISTERS};
pub use recursion::{
    extensionally_agree, kleene_fixed_point, CodeTransformer, FixedPointConfig, ProgramTransformer,
};
pub use smn::{smn, specialize};
pub use w::{w_member, CeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("budget of {budget} exhausted before the transformer halted")]
    BudgetExhausted { budget: u64 },
    #[error("program code does not fit in a machine register")]
    CodeTooLarge,
    #[error("no verified fixed point among {candidates} candidates")]
    NoFixedPointFound { candidates: u64 },
}
