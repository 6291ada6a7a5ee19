//! Closed-form expressions in the two coordinates `x` and `y`.
//!
//! Expressions are parsed from a small infix grammar, evaluated at points,
//! and differentiated symbolically. The only rewriting ever applied is
//! constant folding plus the neutral-element identities of `+`, `*` and `^`,
//! so trees stay small under repeated differentiation.

mod diff;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::scalar::{Field, Real};

pub use parse::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply<T: Real>(self, v: T) -> T {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Tanh => v.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power with a constant exponent.
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("log of non-positive value {value} in `{subtree}`")]
    LogDomain { value: f64, subtree: String },
    #[error("division by zero in `{subtree}`")]
    DivisionByZero { subtree: String },
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn folded(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(p), Expr::Const(q)) = (&a, &b) {
            if let Some(e) = folded(p + q) {
                return e;
            }
        }
        if is_const(&a, 0.0) {
            return b;
        }
        if is_const(&b, 0.0) {
            return a;
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(p), Expr::Const(q)) = (&a, &b) {
            if let Some(e) = folded(p - q) {
                return e;
            }
        }
        if is_const(&b, 0.0) {
            return a;
        }
        if is_const(&a, 0.0) {
            return Expr::neg(b);
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(p), Expr::Const(q)) = (&a, &b) {
            if let Some(e) = folded(p * q) {
                return e;
            }
        }
        if is_const(&a, 0.0) || is_const(&b, 0.0) {
            return Expr::Const(0.0);
        }
        if is_const(&a, 1.0) {
            return b;
        }
        if is_const(&b, 1.0) {
            return a;
        }
        if is_const(&a, -1.0) {
            return Expr::neg(b);
        }
        if is_const(&b, -1.0) {
            return Expr::neg(a);
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(p), Expr::Const(q)) = (&a, &b) {
            if *q != 0.0 {
                if let Some(e) = folded(p / q) {
                    return e;
                }
            }
        }
        if is_const(&b, 1.0) {
            return a;
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (n, &a) {
            (0, _) => Expr::Const(1.0),
            (1, _) => a,
            (_, Expr::Const(c)) if *c != 0.0 || n > 0 => {
                folded(c.powi(n)).unwrap_or_else(|| Expr::Pow(Box::new(a), n))
            }
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn func(f: Func, a: Expr) -> Expr {
        if let Expr::Const(c) = a {
            if f != Func::Log || c > 0.0 {
                if let Some(e) = folded(f.apply(c)) {
                    return e;
                }
            }
        }
        Expr::Func(f, Box::new(a))
    }

    /// Evaluates the expression at `(x, y)`.
    ///
    /// Logarithms of non-positive values and divisions by exact zero are
    /// reported with the printed subtree where they occurred.
    pub fn eval<T: Real>(&self, x: T, y: T) -> Result<T, EvalError> {
        Ok(match self {
            Expr::Const(c) => <T as Field>::from_real(*c),
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(a) => -a.eval(x, y)?,
            Expr::Add(a, b) => a.eval(x, y)? + b.eval(x, y)?,
            Expr::Sub(a, b) => a.eval(x, y)? - b.eval(x, y)?,
            Expr::Mul(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, y)?;
                let den = b.eval(x, y)?;
                if den == T::zero() {
                    return Err(EvalError::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                num / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(x, y)?;
                if *n < 0 && base == T::zero() {
                    return Err(EvalError::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                base.powi(*n)
            }
            Expr::Func(f, a) => {
                let v = a.eval(x, y)?;
                if *f == Func::Log && v <= T::zero() {
                    return Err(EvalError::LogDomain {
                        value: v.to_f64().unwrap_or(f64::NAN),
                        subtree: self.to_string(),
                    });
                }
                f.apply(v)
            }
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// True when the tree contains no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    // Binding strength used by the printer; mirrors the grammar levels.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(_, n) if *n < 0 => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Func(..) => 5,
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Child<'a>(&'a Expr, u8);

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Canonical printer: output re-parses to a tree that evaluates identically.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(a) => write!(f, "-{}", Child(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", Child(a, 1), Child(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", Child(a, 1), Child(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Child(a, 2), Child(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", Child(a, 2), Child(b, 3)),
            Expr::Pow(a, n) if *n >= 0 => write!(f, "{}^{n}", Child(a, 5)),
            Expr::Pow(a, n) => write!(f, "1/{}^{}", Child(a, 5), -(*n as i64)),
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        parse(s).unwrap().eval(x, y).unwrap()
    }

    #[test]
    fn literal_parses_to_constant() {
        assert_eq!(parse("1").unwrap(), Expr::Const(1.0));
    }

    #[test]
    fn function_application_shape() {
        let e = parse("exp(x+y)").unwrap();
        assert_eq!(
            e,
            Expr::Func(
                Func::Exp,
                Box::new(Expr::Add(Box::new(Expr::x()), Box::new(Expr::y())))
            )
        );
    }

    #[test]
    fn precedence_hand_evaluation() {
        // 2*1^2 - 3/(1+2) = 1
        assert_eq!(ev("x*y^2 - 3/(1+x)", 2.0, 1.0), 1.0);
    }

    #[test]
    fn simple_evaluations() {
        assert_eq!(ev("x", 3.0, 7.0), 3.0);
        assert_eq!(ev("log(exp(y))", 0.0, 2.0), 2.0);
        let v = ev("sinh(x)*cosh(x)", 1.0, 0.0);
        assert!((v - 1.813_430_203_9).abs() < 1e-10, "{v}");
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(ev("-x^2", 3.0, 0.0), -9.0);
        assert_eq!(ev("(-x)^2", 3.0, 0.0), 9.0);
        assert_eq!(ev("--x", 3.0, 0.0), 3.0);
    }

    #[test]
    fn left_associativity() {
        assert_eq!(ev("8-4-2", 0.0, 0.0), 2.0);
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
    }

    #[test]
    fn domain_errors_name_the_subtree() {
        let err = parse("1 + log(x - 1)").unwrap().eval(0.5, 0.0).unwrap_err();
        match err {
            EvalError::LogDomain { value, subtree } => {
                assert_eq!(value, -0.5);
                assert_eq!(subtree, "log(x - 1)");
            }
            e => panic!("unexpected {e:?}"),
        }
        let err = parse("y/(x-x)").unwrap().eval(1.0, 1.0).unwrap_err();
        assert!(matches!(err, EvalError::DivisionByZero { .. }));
    }

    #[test]
    fn single_precision_evaluation() {
        let e = parse("x*y + 1").unwrap();
        let v: f32 = e.eval(2.0_f32, 3.0_f32).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn printer_round_trips_structure() {
        for s in [
            "x - (y - 1)",
            "x/(y*2)",
            "-(x + y)^3",
            "exp(-x)*sin(y)",
            "(x^2)^3",
        ] {
            let e = parse(s).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{s} -> {e}");
        }
    }

    #[test]
    fn folding_keeps_trees_small() {
        let e = Expr::add(Expr::mul(Expr::Const(0.0), Expr::x()), Expr::y());
        assert_eq!(e, Expr::y());
        assert_eq!(Expr::pow(Expr::x(), 1), Expr::x());
        assert_eq!(Expr::func(Func::Exp, Expr::Const(0.0)), Expr::Const(1.0));
        // log(-1) must stay symbolic so evaluation reports it
        assert!(matches!(
            Expr::func(Func::Log, Expr::Const(-1.0)),
            Expr::Func(..)
        ));
    }
}
