//! Symbolic differentiation.

use super::{Expr, Func, Var};

impl Expr {
    /// Exact partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.differentiate(var)),
            Expr::Add(a, b) => Expr::add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(var), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                if db.is_zero() {
                    return Expr::div(da, (**b).clone());
                }
                Expr::div(
                    Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                    Expr::pow((**b).clone(), 2),
                )
            }
            Expr::Pow(a, n) => {
                if *n == 0 {
                    return Expr::Const(0.0);
                }
                Expr::mul(
                    Expr::mul(Expr::Const(*n as f64), Expr::pow((**a).clone(), n - 1)),
                    a.differentiate(var),
                )
            }
            Expr::Func(f, a) => {
                let inner = a.differentiate(var);
                if inner.is_zero() {
                    return Expr::Const(0.0);
                }
                let a = (**a).clone();
                let outer = match f {
                    Func::Exp => Expr::func(Func::Exp, a),
                    Func::Log => return Expr::div(inner, a),
                    Func::Sin => Expr::func(Func::Cos, a),
                    Func::Cos => Expr::neg(Expr::func(Func::Sin, a)),
                    Func::Sinh => Expr::func(Func::Cosh, a),
                    Func::Cosh => Expr::func(Func::Sinh, a),
                    Func::Tanh => {
                        Expr::sub(Expr::Const(1.0), Expr::pow(Expr::func(Func::Tanh, a), 2))
                    }
                };
                Expr::mul(outer, inner)
            }
        }
    }

    /// Mixed or repeated partial derivative, applied left to right.
    pub fn partial(&self, vars: &[Var]) -> Expr {
        vars.iter()
            .fold(self.clone(), |acc, v| acc.differentiate(*v))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }
}
