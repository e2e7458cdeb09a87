//! Symbolic differentiation with light constant folding. Derivatives of
//! `abs`, `min`, and `max` are taken in the almost-everywhere sense and
//! flagged with `kink = true`: `abs(u)` differentiates to `u' * u/abs(u)`
//! and `min`/`max` select a branch through `step(t) = (1 + t/abs(t))/2`,
//! which is undefined exactly on the kink set.

use super::{BinOp, Expr, Func, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct Derivative {
    pub expr: Expr,
    /// True when the derivative is only valid away from a measure-zero
    /// kink set (introduced by `abs`, `min`, or `max`).
    pub kink: bool,
}

/// Builds a numeric literal, routing negative values through `Neg` so
/// printed expressions reparse to the identical tree.
pub(super) fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(v)
    }
}

fn as_const(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(inner) => as_const(inner).map(|v| -v),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_const(e) == Some(0.0)
}

fn is_one(e: &Expr) -> bool {
    as_const(e) == Some(1.0)
}

pub(super) fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return num(x + y);
    }
    Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))
}

pub(super) fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return num(x - y);
    }
    Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))
}

pub(super) fn neg(a: Expr) -> Expr {
    if let Expr::Neg(inner) = a {
        return *inner;
    }
    if is_zero(&a) {
        return Expr::Num(0.0);
    }
    Expr::Neg(Box::new(a))
}

pub(super) fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return Expr::Num(0.0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return num(x * y);
    }
    Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))
}

pub(super) fn div(a: Expr, b: Expr) -> Expr {
    if is_one(&b) {
        return a;
    }
    if is_zero(&a) && !is_zero(&b) {
        return Expr::Num(0.0);
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        if y != 0.0 {
            return num(x / y);
        }
    }
    Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))
}

pub(super) fn pow(a: Expr, b: Expr) -> Expr {
    if let Some(e) = as_const(&b) {
        if e == 1.0 {
            return a;
        }
        if e == 0.0 {
            return Expr::Num(1.0);
        }
    }
    Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b))
}

fn call1(f: Func, a: Expr) -> Expr {
    Expr::Call(f, vec![a])
}

/// step(t) = (1 + t/abs(t))/2 — the indicator of {t > 0} away from t = 0.
fn step(t: Expr) -> Expr {
    div(
        add(Expr::Num(1.0), div(t.clone(), call1(Func::Abs, t))),
        Expr::Num(2.0),
    )
}

pub fn differentiate(expr: &Expr, var: Var) -> Derivative {
    let mut kink = false;
    let expr = d(expr, var, &mut kink);
    Derivative { expr, kink }
}

fn d(e: &Expr, var: Var, kink: &mut bool) -> Expr {
    match e {
        Expr::Num(_) | Expr::Param(_) => Expr::Num(0.0),
        Expr::Var(v) => {
            if *v == var {
                Expr::Num(1.0)
            } else {
                Expr::Num(0.0)
            }
        }
        Expr::Neg(inner) => neg(d(inner, var, kink)),
        Expr::Bin(op, a, b) => {
            let da = d(a, var, kink);
            let db = d(b, var, kink);
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b), mul(a, db)),
                BinOp::Div => div(
                    sub(mul(da, b.clone()), mul(a, db)),
                    pow(b, Expr::Num(2.0)),
                ),
                BinOp::Pow => {
                    if is_zero(&db) {
                        if let Some(c) = as_const(&b) {
                            // d/dx a^c = c a^(c-1) a'
                            return mul(mul(num(c), pow(a, num(c - 1.0))), da);
                        }
                    }
                    // general case: a^b (b' log a + b a'/a)
                    mul(
                        pow(a.clone(), b.clone()),
                        add(
                            mul(db, call1(Func::Log, a.clone())),
                            div(mul(b, da), a),
                        ),
                    )
                }
            }
        }
        Expr::Call(f, args) => {
            let u = args[0].clone();
            let du = d(&args[0], var, kink);
            match f {
                Func::Exp => mul(call1(Func::Exp, u), du),
                Func::Log => div(du, u),
                Func::Sin => mul(call1(Func::Cos, u), du),
                Func::Cos => neg(mul(call1(Func::Sin, u), du)),
                Func::Sqrt => div(du, mul(Expr::Num(2.0), call1(Func::Sqrt, u))),
                Func::Abs => {
                    if is_zero(&du) {
                        return Expr::Num(0.0);
                    }
                    *kink = true;
                    mul(div(u.clone(), call1(Func::Abs, u)), du)
                }
                Func::Min | Func::Max => {
                    let v = args[1].clone();
                    let dv = d(&args[1], var, kink);
                    if is_zero(&du) && is_zero(&dv) {
                        return Expr::Num(0.0);
                    }
                    *kink = true;
                    // min picks the branch where the other argument is
                    // larger; max the opposite.
                    let (first_wins, second_wins) = match f {
                        Func::Min => (
                            step(sub(v.clone(), u.clone())),
                            step(sub(u.clone(), v.clone())),
                        ),
                        _ => (
                            step(sub(u.clone(), v.clone())),
                            step(sub(v.clone(), u.clone())),
                        ),
                    };
                    add(mul(first_wins, du), mul(second_wins, dv))
                }
            }
        }
    }
}
