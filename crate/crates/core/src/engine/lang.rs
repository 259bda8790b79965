//! The machine mini-language:
//!
//! ```text
//! machine := term ("OR" term)*
//! term    := atom ("AND" atom)*
//! atom    := "ACCEPT" "WHEN" "HAS" set ["AFTER" "FUEL" nat]
//!          | "ACCEPT" "IMMEDIATELY"
//!          | "NEVER"
//!          | "(" machine ")"
//! set     := "{" [nat ("," nat)*] "}"
//! ```

use super::MonotoneMachine;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("machine language error at token {position}: {message}")]
pub struct MachineParseError {
    pub position: usize,
    pub message: String,
}

struct Tokens {
    items: Vec<String>,
    cursor: usize,
}

impl Tokens {
    fn lex(text: &str) -> Self {
        let mut items = Vec::new();
        let mut current = String::new();
        for c in text.chars() {
            match c {
                '{' | '}' | ',' | '(' | ')' => {
                    if !current.is_empty() {
                        items.push(std::mem::take(&mut current));
                    }
                    items.push(c.to_string());
                }
                c if c.is_whitespace() => {
                    if !current.is_empty() {
                        items.push(std::mem::take(&mut current));
                    }
                }
                c => current.push(c),
            }
        }
        if !current.is_empty() {
            items.push(current);
        }
        Tokens { items, cursor: 0 }
    }

    fn peek(&self) -> Option<&str> {
        self.items.get(self.cursor).map(String::as_str)
    }

    fn next(&mut self) -> Option<String> {
        let t = self.items.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn expect(&mut self, token: &str) -> Result<(), MachineParseError> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(self.error(format!("expected `{token}`, got {}", describe(other.as_deref())))),
        }
    }

    fn error(&self, message: String) -> MachineParseError {
        MachineParseError { position: self.cursor.saturating_sub(1), message }
    }
}

fn describe(t: Option<&str>) -> String {
    match t {
        Some(t) => format!("`{t}`"),
        None => "end of input".to_string(),
    }
}

pub fn parse_machine(text: &str) -> Result<MonotoneMachine, MachineParseError> {
    let mut tokens = Tokens::lex(text);
    let machine = parse_or(&mut tokens)?;
    match tokens.peek() {
        None => Ok(machine),
        Some(t) => Err(tokens.error(format!("unexpected trailing `{t}`"))),
    }
}

fn parse_or(tokens: &mut Tokens) -> Result<MonotoneMachine, MachineParseError> {
    let mut machine = parse_and(tokens)?;
    while tokens.peek() == Some("OR") {
        tokens.next();
        machine = machine.or(&parse_and(tokens)?);
    }
    Ok(machine)
}

fn parse_and(tokens: &mut Tokens) -> Result<MonotoneMachine, MachineParseError> {
    let mut machine = parse_atom(tokens)?;
    while tokens.peek() == Some("AND") {
        tokens.next();
        machine = machine.and(&parse_atom(tokens)?);
    }
    Ok(machine)
}

fn parse_atom(tokens: &mut Tokens) -> Result<MonotoneMachine, MachineParseError> {
    match tokens.next().as_deref() {
        Some("(") => {
            let inner = parse_or(tokens)?;
            tokens.expect(")")?;
            Ok(inner)
        }
        Some("NEVER") => Ok(MonotoneMachine::never()),
        Some("ACCEPT") => match tokens.next().as_deref() {
            Some("IMMEDIATELY") => Ok(MonotoneMachine::accept_immediately()),
            Some("WHEN") => {
                tokens.expect("HAS")?;
                let set = parse_set(tokens)?;
                let machine = MonotoneMachine::has_all(set);
                if tokens.peek() == Some("AFTER") {
                    tokens.next();
                    tokens.expect("FUEL")?;
                    let n = parse_nat(tokens)?;
                    Ok(machine.after_fuel(n))
                } else {
                    Ok(machine)
                }
            }
            other => Err(tokens.error(format!("expected `WHEN` or `IMMEDIATELY`, got {}", describe(other)))),
        },
        other => Err(tokens.error(format!("expected a machine clause, got {}", describe(other)))),
    }
}

fn parse_set(tokens: &mut Tokens) -> Result<BTreeSet<u64>, MachineParseError> {
    tokens.expect("{")?;
    let mut set = BTreeSet::new();
    if tokens.peek() == Some("}") {
        tokens.next();
        return Ok(set);
    }
    loop {
        set.insert(parse_nat(tokens)?);
        match tokens.next().as_deref() {
            Some(",") => continue,
            Some("}") => return Ok(set),
            other => return Err(tokens.error(format!("expected `,` or `}}`, got {}", describe(other)))),
        }
    }
}

fn parse_nat(tokens: &mut Tokens) -> Result<u64, MachineParseError> {
    match tokens.next() {
        Some(t) => match t.parse() {
            Ok(n) => Ok(n),
            Err(_) => Err(tokens.error(format!("expected a natural number, got `{t}`"))),
        },
        None => Err(tokens.error("expected a natural number, got end of input".to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::accepts;
    use crate::spaces::ScottPoint;

    #[test]
    fn parses_has_clause() {
        let m = parse_machine("ACCEPT WHEN HAS {2,5}").unwrap();
        let cert = accepts(&m, &ScottPoint::all_naturals(), 100).unwrap();
        assert!(cert.support.contains(&2) && cert.support.contains(&5));
    }

    #[test]
    fn parses_after_fuel_and_combinations() {
        let m = parse_machine("ACCEPT WHEN HAS {0} AFTER FUEL 100 OR ACCEPT WHEN HAS {3}").unwrap();
        let cert = accepts(&m, &ScottPoint::all_naturals(), 1000).unwrap();
        // The HAS {3} branch fires first, well before fuel 100.
        assert!(cert.fuel < 100);

        let both = parse_machine("ACCEPT WHEN HAS {1} AND ACCEPT WHEN HAS {2}").unwrap();
        assert!(accepts(&both, &ScottPoint::all_naturals(), 100).is_ok());
    }

    #[test]
    fn parses_empty_set_and_parens() {
        assert!(parse_machine("ACCEPT WHEN HAS {}").is_ok());
        assert!(parse_machine("(ACCEPT IMMEDIATELY) AND NEVER").is_ok());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_machine("ACCEPT HAS {2}").is_err());
        assert!(parse_machine("ACCEPT WHEN HAS {2").is_err());
        assert!(parse_machine("ACCEPT WHEN HAS {a}").is_err());
        assert!(parse_machine("").is_err());
        assert!(parse_machine("ACCEPT WHEN HAS {2} XYZ").is_err());
    }
}
