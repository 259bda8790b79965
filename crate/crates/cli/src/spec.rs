//! Parsers for the CLI's small argument languages: semidecider specs, overt
//! subset specs, and filter-oracle specs.

use ktop_core::kernel::CeSet;
use ktop_core::sigma::{omega_lt_infty, OmegaBar, Semi};
use ktop_core::sober::{nbh_oracle, FilterOracle};
use ktop_core::spaces::{parse_cantor_point, parse_rational, CantorPoint, DyadicReal};
use ktop_core::OvertSubset;
use num_bigint::BigUint;
use std::str::FromStr;

pub type SpecError = String;

/// Semidecider specs for `sigma probe`:
/// `top | bot | after:N | omega:N | omega:inf | wmember:CODE,N |
///  and(a,b) | or(a,b)`.
pub fn parse_semi(text: &str) -> Result<Semi, SpecError> {
    let text = text.trim();
    if let Some(rest) = strip_call(text, "and") {
        let (a, b) = split_two(rest)?;
        return Ok(parse_semi(a)?.and(&parse_semi(b)?));
    }
    if let Some(rest) = strip_call(text, "or") {
        let (a, b) = split_two(rest)?;
        return Ok(parse_semi(a)?.or(&parse_semi(b)?));
    }
    match text {
        "top" => return Ok(Semi::top()),
        "bot" => return Ok(Semi::bot()),
        _ => {}
    }
    if let Some(n) = text.strip_prefix("after:") {
        let n: u64 = n.parse().map_err(|_| format!("invalid fuel threshold `{n}`"))?;
        return Ok(Semi::after(n));
    }
    if let Some(rest) = text.strip_prefix("omega:") {
        let t = if rest == "inf" {
            OmegaBar::infinity()
        } else {
            OmegaBar::finite(rest.parse().map_err(|_| format!("invalid natural `{rest}`"))?)
        };
        return Ok(omega_lt_infty(&t));
    }
    if let Some(rest) = text.strip_prefix("wmember:") {
        let (code, n) = rest
            .split_once(',')
            .ok_or_else(|| "wmember needs `CODE,N`".to_string())?;
        let code = BigUint::from_str(code.trim()).map_err(|_| format!("invalid code `{code}`"))?;
        let n: u64 = n.trim().parse().map_err(|_| format!("invalid natural `{n}`"))?;
        return Ok(CeSet::new(code).member(n));
    }
    Err(format!("unknown semidecider spec `{text}`"))
}

fn strip_call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

/// Splits `a,b` at the top level (respecting nested parentheses).
fn split_two(text: &str) -> Result<(&str, &str), SpecError> {
    let mut depth = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Ok((&text[..i], &text[i + 1..])),
            _ => {}
        }
    }
    Err(format!("expected two comma-separated arguments in `{text}`"))
}

/// Overt subsets of the dyadic reals:
/// `points:p1;p2;...` | `integers-ge:N`.
pub fn parse_overt_dyadic(text: &str) -> Result<OvertSubset<DyadicReal>, SpecError> {
    let text = text.trim();
    if let Some(list) = text.strip_prefix("points:") {
        let mut points = Vec::new();
        for part in list.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            points.push(parse_rational(part).map_err(|e| e.to_string())?);
        }
        return Ok(OvertSubset::from_points(points));
    }
    if let Some(n) = text.strip_prefix("integers-ge:") {
        let start: i64 = n.parse().map_err(|_| format!("invalid integer `{n}`"))?;
        return Ok(OvertSubset::new(move |k| {
            let v = start.checked_add(i64::try_from(k).ok()?)?;
            Some(DyadicReal::exact(ktop_core::Dyadic::from_int(v)))
        }));
    }
    Err(format!("unknown overt spec `{text}` (expected `points:..` or `integers-ge:N`)"))
}

/// Overt subsets of Cantor space:
/// `bit:I` (eventually-zero streams with bit I set) | `points:lit;lit`.
pub fn parse_overt_cantor(text: &str) -> Result<OvertSubset<CantorPoint>, SpecError> {
    let text = text.trim();
    if let Some(i) = text.strip_prefix("bit:") {
        let i: usize = i.parse().map_err(|_| format!("invalid bit index `{i}`"))?;
        return Ok(OvertSubset::new(move |n| {
            let prefix = ktop_core::spaces::prefix_decode(n);
            (prefix.len() > i && prefix[i])
                .then(|| CantorPoint::eventually_constant(prefix, false))
        }));
    }
    if let Some(list) = text.strip_prefix("points:") {
        let mut points = Vec::new();
        for part in list.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            points.push(parse_cantor_point(part).map_err(|e| e.to_string())?);
        }
        return Ok(OvertSubset::from_points(points));
    }
    Err(format!("unknown overt spec `{text}` (expected `bit:I` or `points:..`)"))
}

/// Filter oracles for `sober recover`:
/// `point RATIONAL` (the genuine neighborhood oracle) or
/// `code DECIMAL` (a kernel program on `pair(ball_code, fuel)` inputs).
pub fn parse_oracle(text: &str, program_fuel: u64) -> Result<FilterOracle, SpecError> {
    let text = text.trim();
    if let Some(rat) = text.strip_prefix("point ") {
        let x = parse_rational(rat).map_err(|e| e.to_string())?;
        return Ok(nbh_oracle(&x));
    }
    if let Some(code) = text.strip_prefix("code ") {
        let code =
            BigUint::from_str(code.trim()).map_err(|_| format!("invalid program code `{code}`"))?;
        let program = ktop_core::kernel::decode(&code);
        return Ok(FilterOracle::from_program(program, program_fuel));
    }
    Err(format!("unknown oracle spec `{text}` (expected `point P/Q` or `code N`)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ktop_core::sigma::{markov_run, MarkovOutcome};

    #[test]
    fn semi_specs() {
        assert_eq!(markov_run(&parse_semi("top").unwrap(), 10), MarkovOutcome::Accepted { fuel: 0 });
        assert_eq!(
            markov_run(&parse_semi("after:7").unwrap(), 10),
            MarkovOutcome::Accepted { fuel: 7 }
        );
        assert_eq!(
            markov_run(&parse_semi("and(top, after:3)").unwrap(), 10),
            MarkovOutcome::Accepted { fuel: 3 }
        );
        assert_eq!(
            markov_run(&parse_semi("omega:5").unwrap(), 10),
            MarkovOutcome::Accepted { fuel: 5 }
        );
        assert_eq!(markov_run(&parse_semi("omega:inf").unwrap(), 100), MarkovOutcome::BudgetExhausted);
        assert!(parse_semi("nonsense").is_err());
    }

    #[test]
    fn overt_specs() {
        let o = parse_overt_dyadic("points: 1/2; -3").unwrap();
        assert!(o.at(0).is_some() && o.at(1).is_some() && o.at(2).is_none());
        assert!(parse_overt_dyadic("integers-ge:1").unwrap().at(5).is_some());
        assert!(parse_overt_cantor("bit:2").is_ok());
        assert!(parse_overt_dyadic("everything").is_err());
    }
}
