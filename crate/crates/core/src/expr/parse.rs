//! Recursive-descent parser for chart expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*        '/' only by a nonzero rational constant
//! factor := ('-' | '+') factor | base ('^' integer)?
//! base   := number | variable | '(' expr ')' | ('sin' | 'cos' | 'exp') '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ```
//!
//! Offsets are byte offsets into the source. When the input ends where an
//! operand is required, the error points at the token that required it; a
//! missing `)` is reported at the end of the input.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::Expr;

const MAX_EXPONENT: u32 = 255;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    MissingOperand,
    ExpectedClosingParen,
    ExpectedOpenParen(String),
    UnknownVariable(String),
    NonIntegerExponent,
    NegativeExponent,
    ExponentTooLarge,
    NonConstantDivisor,
    DivisionByZero,
    EmptyInput,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token {t:?}"),
            ParseErrorKind::MissingOperand => f.write_str("missing operand"),
            ParseErrorKind::ExpectedClosingParen => f.write_str("expected ')'"),
            ParseErrorKind::ExpectedOpenParen(name) => write!(f, "expected '(' after {name}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable {v:?}"),
            ParseErrorKind::NonIntegerExponent => f.write_str("exponent must be an integer"),
            ParseErrorKind::NegativeExponent => f.write_str("exponent must be nonnegative"),
            ParseErrorKind::ExponentTooLarge => {
                write!(f, "exponent exceeds {MAX_EXPONENT}")
            }
            ParseErrorKind::NonConstantDivisor => f.write_str("division is only allowed by a rational constant"),
            ParseErrorKind::DivisionByZero => f.write_str("division by zero"),
            ParseErrorKind::EmptyInput => f.write_str("empty expression"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: BigRational, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Num { value, .. } => value.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn err<T>(kind: ParseErrorKind, offset: usize) -> Result<T, ParseError> {
    Err(ParseError { kind, offset })
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let (tok, end) = lex_number(src, start)?;
                out.push((tok, start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                out.push((Tok::Ident(src[start..end].to_string()), start));
                i = end;
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap();
                return err(ParseErrorKind::UnexpectedChar(ch), start);
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

fn lex_number(src: &str, start: usize) -> Result<(Tok, usize), ParseError> {
    let bytes = src.as_bytes();
    let mut i = start;
    let mut digits = String::new();
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    let mut frac_len: i64 = 0;
    let mut integer = true;
    if i < bytes.len() && bytes[i] == b'.' {
        integer = false;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    if digits.is_empty() {
        return err(ParseErrorKind::UnexpectedChar('.'), start);
    }
    let mut exp: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let mut neg = false;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            neg = bytes[j] == b'-';
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return err(ParseErrorKind::UnexpectedChar(bytes[i] as char), i);
        }
        exp = src[exp_start..j]
            .parse::<i64>()
            .ok()
            .filter(|e| *e <= 4096)
            .ok_or(ParseError { kind: ParseErrorKind::UnexpectedToken(src[start..j].into()), offset: start })?;
        if neg {
            exp = -exp;
        }
        integer = false;
        i = j;
    }
    let mantissa: BigInt = digits.parse().expect("digit string");
    let shift = exp - frac_len;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(mantissa * Pow::pow(&ten, shift as u64))
    } else {
        BigRational::new(mantissa, Pow::pow(&ten, (-shift) as u64))
    };
    Ok((Tok::Num { value, integer }, i))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    /// Error for a missing operand after the token at `anchor`.
    fn operand_error<T>(&self, anchor: usize) -> Result<T, ParseError> {
        match self.toks.get(self.pos) {
            None => err(ParseErrorKind::MissingOperand, anchor),
            Some((t, o)) => err(ParseErrorKind::UnexpectedToken(t.text()), *o),
        }
    }

    fn expr(&mut self, anchor: usize) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term(anchor)?];
        while let Some(t) = self.peek() {
            let neg = match t {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            let (_, at) = self.bump();
            let rhs = self.term(at)?;
            terms.push(if neg { Expr::Mul(vec![Expr::int(-1), rhs]) } else { rhs });
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self, anchor: usize) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor(anchor)?];
        while let Some(t) = self.peek() {
            match t {
                Tok::Star => {
                    let (_, at) = self.bump();
                    factors.push(self.factor(at)?);
                }
                Tok::Slash => {
                    let (_, at) = self.bump();
                    let divisor_at = self.offset();
                    let divisor = self.factor(at)?;
                    let value = divisor
                        .as_rational()
                        .ok_or(ParseError { kind: ParseErrorKind::NonConstantDivisor, offset: divisor_at })?;
                    if value.is_zero() {
                        return err(ParseErrorKind::DivisionByZero, divisor_at);
                    }
                    factors.push(Expr::Const(BigRational::one() / value));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Mul(factors) })
    }

    fn factor(&mut self, anchor: usize) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                let (_, at) = self.bump();
                let inner = self.factor(at)?;
                return Ok(match inner {
                    Expr::Const(c) => Expr::Const(-c),
                    other => Expr::Mul(vec![Expr::int(-1), other]),
                });
            }
            Some(Tok::Plus) => {
                let (_, at) = self.bump();
                return self.factor(at);
            }
            _ => {}
        }
        let base = self.base(anchor)?;
        if let Some(Tok::Caret) = self.peek() {
            let (_, at) = self.bump();
            let exponent = self.exponent(at)?;
            return Ok(Expr::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self, anchor: usize) -> Result<u32, ParseError> {
        let negative_at = match self.peek() {
            Some(Tok::Minus) => Some(self.bump().1),
            _ => None,
        };
        match self.toks.get(self.pos).cloned() {
            None => err(ParseErrorKind::MissingOperand, negative_at.unwrap_or(anchor)),
            Some((Tok::Num { value, integer }, at)) => {
                self.pos += 1;
                if !integer || !value.is_integer() {
                    return err(ParseErrorKind::NonIntegerExponent, at);
                }
                if let Some(neg_at) = negative_at {
                    if !value.is_zero() {
                        return err(ParseErrorKind::NegativeExponent, neg_at);
                    }
                }
                value
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|e: &u32| *e <= MAX_EXPONENT)
                    .ok_or(ParseError { kind: ParseErrorKind::ExponentTooLarge, offset: at })
            }
            Some((_, at)) => err(ParseErrorKind::NonIntegerExponent, at),
        }
    }

    fn base(&mut self, anchor: usize) -> Result<Expr, ParseError> {
        let Some((tok, at)) = self.toks.get(self.pos).cloned() else {
            return err(ParseErrorKind::MissingOperand, anchor);
        };
        match tok {
            Tok::Num { value, .. } => {
                self.pos += 1;
                Ok(Expr::Const(value))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr(at)?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(f) = function(&name) {
                    match self.toks.get(self.pos) {
                        Some((Tok::LParen, open_at)) => {
                            let open_at = *open_at;
                            self.pos += 1;
                            let arg = self.expr(open_at)?;
                            self.expect_close()?;
                            Ok(f(Box::new(arg)))
                        }
                        Some((_, o)) => err(ParseErrorKind::ExpectedOpenParen(name), *o),
                        None => err(ParseErrorKind::ExpectedOpenParen(name), self.end),
                    }
                } else if let Some(i) = self.names.iter().position(|n| *n == name) {
                    Ok(Expr::Var(i))
                } else {
                    err(ParseErrorKind::UnknownVariable(name), at)
                }
            }
            _ => self.operand_error(anchor),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => err(ParseErrorKind::UnexpectedToken(t.text()), self.offset()),
            None => err(ParseErrorKind::ExpectedClosingParen, self.end),
        }
    }
}

fn function(name: &str) -> Option<fn(Box<Expr>) -> Expr> {
    match name {
        "sin" => Some(Expr::Sin),
        "cos" => Some(Expr::Cos),
        "exp" => Some(Expr::Exp),
        _ => None,
    }
}

pub(super) fn parse(src: &str, names: &[String]) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return err(ParseErrorKind::EmptyInput, 0);
    }
    let mut p = Parser { toks, pos: 0, end: src.len(), names };
    let e = p.expr(0)?;
    if let Some((t, o)) = p.toks.get(p.pos) {
        return err(ParseErrorKind::UnexpectedToken(t.text()), *o);
    }
    Ok(e)
}
