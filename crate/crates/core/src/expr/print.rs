//! Rendering expression trees back to parser-compatible source text.

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::Expr;

// Binding strength of a rendered fragment.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const ATOM: u8 = 4;

pub(super) fn render(e: &Expr, names: &[String]) -> String {
    go(e, names).0
}

fn name(i: usize, names: &[String]) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1))
}

fn rational(c: &BigRational) -> (String, u8) {
    let s = if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) };
    let prec = if c.is_negative() {
        SUM
    } else if c.is_integer() {
        ATOM
    } else {
        PRODUCT
    };
    (s, prec)
}

fn paren((s, p): (String, u8), min: u8) -> String {
    if p >= min {
        s
    } else {
        format!("({s})")
    }
}

fn go(e: &Expr, names: &[String]) -> (String, u8) {
    match e {
        Expr::Const(c) => rational(c),
        Expr::Var(i) => (name(*i, names), ATOM),
        Expr::Sin(a) => (format!("sin({})", go(a, names).0), ATOM),
        Expr::Cos(a) => (format!("cos({})", go(a, names).0), ATOM),
        Expr::Exp(a) => (format!("exp({})", go(a, names).0), ATOM),
        Expr::Pow(b, k) => (format!("{}^{}", paren(go(b, names), ATOM), k), ATOM - 1),
        Expr::Mul(xs) => product(xs, names),
        Expr::Add(xs) => {
            if xs.is_empty() {
                return ("0".into(), ATOM);
            }
            let mut out = String::new();
            for (k, x) in xs.iter().enumerate() {
                let (s, p) = go(x, names);
                let s = if matches!(x, Expr::Add(_)) && p <= SUM { format!("({s})") } else { s };
                if k == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            (out, SUM)
        }
    }
}

fn product(xs: &[Expr], names: &[String]) -> (String, u8) {
    if xs.is_empty() {
        return ("1".into(), ATOM);
    }
    let (lead_neg, rest) = match xs.first() {
        Some(Expr::Const(c)) if c.is_negative() && (-c).is_one() && xs.len() > 1 => (true, &xs[1..]),
        _ => (false, xs),
    };
    let mut parts = Vec::with_capacity(rest.len());
    for (k, x) in rest.iter().enumerate() {
        let frag = go(x, names);
        // A leading factor may carry its own unary minus; later ones may not.
        let first = k == 0 && !lead_neg;
        let s = if first && frag.1 >= SUM && !matches!(x, Expr::Add(_)) { frag.0 } else { paren(frag, PRODUCT) };
        parts.push(s);
    }
    let body = parts.join("*");
    if lead_neg {
        (format!("-{body}"), SUM)
    } else if body.starts_with('-') {
        (body, SUM)
    } else {
        (body, PRODUCT)
    }
}
