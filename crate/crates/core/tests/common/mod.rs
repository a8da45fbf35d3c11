#![allow(dead_code)]

use dirac_forge_core::{Expr, OneForm, VectorField};
use proptest::prelude::*;

pub fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(-3i64..=3, 1i64..=4).prop_map(|(n, d)| Expr::rational(n, d)), (0usize..2).prop_map(Expr::Var),]
}

pub fn poly_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Mul),
            (inner, 0u32..=2).prop_map(|(b, e)| Expr::Pow(Box::new(b), e)),
        ]
    })
}

pub fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Mul),
            (inner.clone(), 0u32..=2).prop_map(|(b, e)| Expr::Pow(Box::new(b), e)),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.prop_map(|a| Expr::Exp(Box::new(a))),
        ]
    })
}

/// Small expressions, mostly polynomial, occasionally with one trig or exp factor.
pub fn small_expr() -> impl Strategy<Value = Expr> {
    let poly = leaf().prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Add),
            prop::collection::vec(inner, 2..3).prop_map(Expr::Mul),
        ]
    });
    (poly, 0u8..6).prop_map(|(e, k)| match k {
        0 => Expr::Mul(vec![e, Expr::Sin(Box::new(Expr::Var(0)))]),
        1 => Expr::Add(vec![e, Expr::Exp(Box::new(Expr::Var(1)))]),
        _ => e,
    })
}

pub fn field(n: usize) -> impl Strategy<Value = VectorField> {
    prop::collection::vec(small_expr(), n).prop_map(|c| VectorField::new(c).normalize())
}

pub fn form(n: usize) -> impl Strategy<Value = OneForm> {
    prop::collection::vec(small_expr(), n).prop_map(|c| OneForm::new(c).normalize())
}
