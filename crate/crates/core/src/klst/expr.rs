//! The expression language for real maps:
//!
//! ```text
//! expr := rat | "x" | expr op expr | fn "(" expr "," expr ")"
//!       | "abs" "(" expr ")" | "(" expr ")"
//! op   := "+" | "-" | "*"
//! fn   := "min" | "max"
//! rat  := int | int "/" pow2
//! ```
//!
//! `*` binds tighter than `+`/`-`; both associate left. Every operation is
//! exact on dyadics and inclusion-monotone on intervals, which is what makes
//! the evaluator a legitimate approximation transformer: division is
//! excluded on purpose.

use crate::dyadic::{Dyadic, Interval};
use crate::spaces::DyadicReal;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(Dyadic),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
}

impl Expr {
    /// Exact evaluation at a dyadic point.
    pub fn eval_exact(&self, x: &Dyadic) -> Dyadic {
        match self {
            Expr::Const(c) => c.clone(),
            Expr::Var => x.clone(),
            Expr::Add(a, b) => &a.eval_exact(x) + &b.eval_exact(x),
            Expr::Sub(a, b) => &a.eval_exact(x) - &b.eval_exact(x),
            Expr::Mul(a, b) => &a.eval_exact(x) * &b.eval_exact(x),
            Expr::Min(a, b) => a.eval_exact(x).min(b.eval_exact(x)),
            Expr::Max(a, b) => a.eval_exact(x).max(b.eval_exact(x)),
            Expr::Abs(a) => a.eval_exact(x).abs(),
        }
    }

    /// Exact interval extension; inclusion-monotone in the argument.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        match self {
            Expr::Const(c) => Interval::point(c.clone()),
            Expr::Var => x.clone(),
            Expr::Add(a, b) => a.eval_interval(x).add(&b.eval_interval(x)),
            Expr::Sub(a, b) => a.eval_interval(x).sub(&b.eval_interval(x)),
            Expr::Mul(a, b) => a.eval_interval(x).mul(&b.eval_interval(x)),
            Expr::Min(a, b) => a.eval_interval(x).min(&b.eval_interval(x)),
            Expr::Max(a, b) => a.eval_interval(x).max(&b.eval_interval(x)),
            Expr::Abs(a) => a.eval_interval(x).abs(),
        }
    }

    /// The approximation transformer: applied to a represented real, yields
    /// a represented real. Each requested precision refines the input until
    /// the exact interval image is narrow enough.
    pub fn apply(&self, x: &DyadicReal) -> DyadicReal {
        let expr = self.clone();
        let x = x.clone();
        DyadicReal::from_fn(move |k| {
            let mut p = k + 2;
            loop {
                let a = x.approx(p);
                let e = Dyadic::pow2(-(p as i64));
                let out = expr.eval_interval(&Interval::new(&a - &e, &a + &e));
                if out.width() <= Dyadic::pow2(-(k as i64)) {
                    return out.midpoint();
                }
                p += 4;
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expression error at offset {offset}: {message}")]
pub struct ExprParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ExprParseError> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                tokens.push((start, Token::Plus));
                i += 1;
            }
            '-' => {
                tokens.push((start, Token::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((start, Token::Star));
                i += 1;
            }
            '/' => {
                tokens.push((start, Token::Slash));
                i += 1;
            }
            '(' => {
                tokens.push((start, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((start, Token::RParen));
                i += 1;
            }
            ',' => {
                tokens.push((start, Token::Comma));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    s.push(bytes[i]);
                    i += 1;
                }
                tokens.push((start, Token::Int(s)));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    s.push(bytes[i]);
                    i += 1;
                }
                tokens.push((start, Token::Ident(s)));
            }
            other => {
                return Err(ExprParseError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.cursor).map(|(o, _)| *o).unwrap_or(usize::MAX)
    }

    fn error(&self, message: impl Into<String>) -> ExprParseError {
        ExprParseError {
            offset: self.tokens.get(self.cursor.saturating_sub(1)).map(|(o, _)| *o).unwrap_or(0),
            message: message.into(),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), ExprParseError> {
        match self.next() {
            Some((_, t)) if t == token => Ok(()),
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    // expr := term (("+" | "-") term)*
    fn expr(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := factor ("*" factor)*
    fn term(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprParseError> {
        match self.next() {
            Some((_, Token::Int(s))) => self.rational(s, false),
            // A minus in factor position starts a negative literal.
            Some((_, Token::Minus)) => match self.next() {
                Some((_, Token::Int(s))) => self.rational(s, true),
                _ => Err(self.error("expected digits after `-`")),
            },
            Some((_, Token::Ident(name))) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "abs" => {
                    self.expect(Token::LParen, "`(` after abs")?;
                    let inner = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    Ok(Expr::Abs(Box::new(inner)))
                }
                "min" | "max" => {
                    self.expect(Token::LParen, "`(` after function name")?;
                    let a = self.expr()?;
                    self.expect(Token::Comma, "`,` between arguments")?;
                    let b = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    if name == "min" {
                        Ok(Expr::Min(Box::new(a), Box::new(b)))
                    } else {
                        Ok(Expr::Max(Box::new(a), Box::new(b)))
                    }
                }
                other => Err(self.error(format!("unknown identifier `{other}`"))),
            },
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("expected a rational, `x`, function, or `(`")),
        }
    }

    // rat := int | int "/" pow2
    fn rational(&mut self, int_digits: String, negative: bool) -> Result<Expr, ExprParseError> {
        let mut numerator: i128 = int_digits
            .parse()
            .map_err(|_| self.error(format!("integer `{int_digits}` out of range")))?;
        if negative {
            numerator = -numerator;
        }
        if self.peek() == Some(&Token::Slash) {
            self.next();
            let den = match self.next() {
                Some((_, Token::Int(s))) => s
                    .parse::<u64>()
                    .map_err(|_| self.error(format!("denominator `{s}` out of range")))?,
                _ => return Err(self.error("expected a denominator after `/`")),
            };
            if den == 0 || !den.is_power_of_two() {
                return Err(self.error(format!("denominator {den} is not a power of two")));
            }
            Ok(Expr::Const(Dyadic::new(numerator.into(), -(den.trailing_zeros() as i64))))
        } else {
            Ok(Expr::Const(Dyadic::new(numerator.into(), 0)))
        }
    }
}

impl FromStr for Expr {
    type Err = ExprParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { tokens: lex(text)?, cursor: 0 };
        let expr = parser.expr()?;
        if parser.peek().is_some() {
            return Err(ExprParseError {
                offset: parser.offset(),
                message: "unexpected trailing input".to_string(),
            });
        }
        Ok(expr)
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprParseError> {
    text.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn d(n: i64, k: u32) -> Dyadic {
        Dyadic::from_fraction_pow2(n, k)
    }

    #[test]
    fn parses_the_catalogue() {
        for src in ["x", "3*x", "abs(x)", "min(x, 1/2)", "x*x - x", "-1/2", "(x + 1) * 2"] {
            parse_expr(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        }
    }

    #[test]
    fn rejects_bad_grammar() {
        assert!(parse_expr("x / 2").is_err()); // division of expressions is out
        assert!(parse_expr("1/3").is_err()); // non-dyadic constant
        assert!(parse_expr("min(x)").is_err());
        assert!(parse_expr("y").is_err());
        assert!(parse_expr("x +").is_err());
        assert!(parse_expr("x 1").is_err());
    }

    #[test]
    fn precedence_and_negatives() {
        let e = parse_expr("x*x - x").unwrap();
        assert_eq!(e.eval_exact(&d(3, 0)), d(6, 0));
        let m = parse_expr("min(x, -1/2)").unwrap();
        assert_eq!(m.eval_exact(&d(3, 0)), d(-1, 1));
        // Binary minus still works with a following literal.
        assert_eq!(parse_expr("x - 1").unwrap().eval_exact(&d(5, 0)), d(4, 0));
    }

    #[test]
    fn interval_images_contain_exact_images() {
        let exprs = ["3*x", "abs(x)", "min(x, 1/2)", "x*x - x"];
        for src in exprs {
            let e = parse_expr(src).unwrap();
            let i = Interval::new(d(-3, 2), d(5, 2));
            let out = e.eval_interval(&i);
            // Sample exact evaluations across the interval.
            for n in -3..=5 {
                let v = e.eval_exact(&d(n, 2));
                assert!(out.contains(&v), "{src} at {n}/4");
            }
        }
    }

    #[test]
    fn apply_is_a_fast_cauchy_transformer() {
        let e = parse_expr("x*x - x").unwrap();
        let x = DyadicReal::from_fraction(BigInt::from(1), BigInt::from(3)).unwrap();
        let fx = e.apply(&x);
        // True value is 1/9 - 1/3 = -2/9.
        let truth = DyadicReal::from_fraction(BigInt::from(-2), BigInt::from(9)).unwrap();
        for k in 0..16u64 {
            let err = (&fx.approx(k) - &truth.approx(20)).abs();
            let bound = &Dyadic::pow2(-(k as i64)) + &Dyadic::pow2(-20);
            assert!(err <= bound, "k={k}");
        }
    }
}
