mod common;

use common::central5;
use proptest::prelude::*;
use wilczynski::expr::{EvalError, Func};
use wilczynski::{Expr, Var};

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4.0..4.0f64).prop_map(|v| Expr::constant((v * 8.0).round() / 8.0)),
        Just(Expr::x()),
        Just(Expr::y()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), 0..4i32).prop_map(|(a, n)| Expr::pow(a, n)),
            (
                inner.clone(),
                prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Tanh)]
            )
                .prop_map(|(a, f)| Expr::func(f, a)),
            inner.clone().prop_map(|a| Expr::div(
                a,
                Expr::add(Expr::constant(2.0), Expr::func(Func::Cos, Expr::x()))
            )),
        ]
    })
}

proptest! {
    #[test]
    fn printing_round_trips(e in arb_expr()) {
        let text = e.to_string();
        let back: Expr = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text);
        let (a, b): (f64, f64) = (e.eval(0.3, -0.7).unwrap(), back.eval(0.3, -0.7).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn derivative_matches_finite_difference(e in arb_expr(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        for var in [Var::X, Var::Y] {
            let sym: f64 = e.differentiate(var).eval(x, y).unwrap();
            let fd = match var {
                Var::X => central5(|t| e.eval(t, y).unwrap(), x, 1e-3),
                Var::Y => central5(|t| e.eval(x, t).unwrap(), y, 1e-3),
            };
            prop_assert!((sym - fd).abs() <= 1e-5 * sym.abs().max(1.0), "{} {:?}: {} vs {}", e, var, sym, fd);
        }
    }

    #[test]
    fn differentiation_is_linear(a in arb_expr(), b in arb_expr(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let lhs: f64 = Expr::add(a.clone(), b.clone()).differentiate(Var::X).eval(x, y).unwrap();
        let rhs: f64 = a.differentiate(Var::X).eval(x, y).unwrap() + b.differentiate(Var::X).eval(x, y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
    }

    #[test]
    fn mixed_partials_commute(e in arb_expr(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let xy: f64 = e.partial(&[Var::X, Var::Y]).eval(x, y).unwrap();
        let yx: f64 = e.partial(&[Var::Y, Var::X]).eval(x, y).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-9 * xy.abs().max(1.0));
    }
}

#[test]
fn single_precision_evaluation() {
    let e: Expr = "sin(x)*exp(y) + x^2".parse().unwrap();
    let lo: f32 = e.eval(0.5f32, 0.25f32).unwrap();
    let hi: f64 = e.eval(0.5, 0.25).unwrap();
    assert!((lo as f64 - hi).abs() < 1e-6);
}

#[test]
fn domain_errors_name_the_subtree() {
    let e: Expr = "1 + log(x - 1)".parse().unwrap();
    match e.eval(0.5f64, 0.0) {
        Err(EvalError::LogDomain { subtree, .. }) => assert_eq!(subtree, "log(x - 1)"),
        other => panic!("{other:?}"),
    }
    let e: Expr = "y/(x - x^2)".parse().unwrap();
    assert!(matches!(
        e.eval(1.0f64, 1.0),
        Err(EvalError::DivisionByZero { .. })
    ));
}
