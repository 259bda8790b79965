//! Parser for the textual program format.
//!
//! One instruction per line: `INC r`, `DECJZ r L`, `JMP L`, `HALT r`.
//! Labels are `Lname:` prefixes. `#` starts a comment. Input arrives in
//! register 0; output is the register named by the executed `HALT`.

use super::program::{Instruction, Program, ProgramError};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

enum RawOperand {
    Register(u16),
    Label(String),
}

struct RawInstruction {
    line: usize,
    col: usize,
    mnemonic: String,
    operands: Vec<(usize, RawOperand)>,
}

pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut labels: HashMap<String, u32> = HashMap::new();
    let mut raw: Vec<RawInstruction> = Vec::new();

    for (line_idx, line) in source.lines().enumerate() {
        let line_no = line_idx + 1;
        let code = line.split('#').next().unwrap_or("");
        let mut rest = code;
        let mut consumed = 0usize;

        // Any number of label prefixes.
        loop {
            let trimmed = rest.trim_start();
            consumed += rest.len() - trimmed.len();
            rest = trimmed;
            let Some(word_end) = rest.find(|c: char| c.is_whitespace()).or(Some(rest.len())) else {
                break;
            };
            let word = &rest[..word_end];
            if let Some(name) = word.strip_suffix(':') {
                if name.is_empty() || !is_identifier(name) {
                    return Err(ParseError::new(line_no, consumed + 1, format!("invalid label `{word}`")));
                }
                if labels.insert(name.to_string(), raw.len() as u32).is_some() {
                    return Err(ParseError::new(line_no, consumed + 1, format!("duplicate label `{name}`")));
                }
                consumed += word.len();
                rest = &rest[word_end..];
            } else {
                break;
            }
        }

        let trimmed = rest.trim_start();
        consumed += rest.len() - trimmed.len();
        if trimmed.is_empty() {
            continue;
        }

        let mut tokens = Vec::new();
        let mut offset = consumed;
        for tok in trimmed.split_whitespace() {
            let col = code[offset..].find(tok).map(|p| offset + p + 1).unwrap_or(offset + 1);
            tokens.push((col, tok));
            offset = col - 1 + tok.len();
        }

        let (mn_col, mnemonic) = tokens[0];
        let mut operands = Vec::new();
        for &(col, tok) in &tokens[1..] {
            let op = if tok.chars().all(|c| c.is_ascii_digit()) {
                let reg: u16 = tok
                    .parse()
                    .map_err(|_| ParseError::new(line_no, col, format!("register `{tok}` out of range")))?;
                RawOperand::Register(reg)
            } else if is_identifier(tok) {
                RawOperand::Label(tok.to_string())
            } else {
                return Err(ParseError::new(line_no, col, format!("invalid operand `{tok}`")));
            };
            operands.push((col, op));
        }
        raw.push(RawInstruction { line: line_no, col: mn_col, mnemonic: mnemonic.to_string(), operands });
    }

    let resolve = |labels: &HashMap<String, u32>, line: usize, col: usize, op: &RawOperand| match op {
        RawOperand::Label(name) => labels
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(line, col, format!("undefined label `{name}`"))),
        RawOperand::Register(_) => Err(ParseError::new(line, col, "expected a label".to_string())),
    };
    let register = |line: usize, col: usize, op: &RawOperand| match op {
        RawOperand::Register(r) => Ok(*r),
        RawOperand::Label(name) => {
            Err(ParseError::new(line, col, format!("expected a register, got `{name}`")))
        }
    };

    let mut instructions = Vec::new();
    for r in &raw {
        let arity_error = |expected: usize| {
            ParseError::new(
                r.line,
                r.col,
                format!("{} expects {expected} operand(s), got {}", r.mnemonic, r.operands.len()),
            )
        };
        let inst = match r.mnemonic.as_str() {
            "INC" => {
                let [(c, op)] = r.operands.as_slice() else { return Err(arity_error(1)) };
                Instruction::Inc { reg: register(r.line, *c, op)? }
            }
            "DECJZ" => {
                let [(c1, op1), (c2, op2)] = r.operands.as_slice() else { return Err(arity_error(2)) };
                Instruction::DecJz {
                    reg: register(r.line, *c1, op1)?,
                    target: resolve(&labels, r.line, *c2, op2)?,
                }
            }
            "JMP" => {
                let [(c, op)] = r.operands.as_slice() else { return Err(arity_error(1)) };
                Instruction::Jmp { target: resolve(&labels, r.line, *c, op)? }
            }
            "HALT" => {
                let [(c, op)] = r.operands.as_slice() else { return Err(arity_error(1)) };
                Instruction::Halt { reg: register(r.line, *c, op)? }
            }
            other => {
                return Err(ParseError::new(r.line, r.col, format!("unknown mnemonic `{other}`")));
            }
        };
        instructions.push(inst);
    }

    Program::new(instructions).map_err(|e| match e {
        ProgramError::TargetOutOfBounds { index, .. } | ProgramError::RegisterTooLarge { index, .. } => {
            let r = &raw[index];
            ParseError::new(r.line, r.col, e.to_string())
        }
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
