//! Expression evaluation with typed domain errors. Operands are always
//! evaluated left to right, so the reported error for an expression with
//! several faults is deterministic.

use std::collections::HashMap;

use thiserror::Error;

use super::{BinOp, Expr, Func};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative base {base} raised to non-integer power {exp}")]
    NegBasePow { base: f64, exp: f64 },
    #[error("zero base raised to negative power {exp}")]
    ZeroBaseNegPow { exp: f64 },
    #[error("log of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("sqrt of negative value {0}")]
    SqrtNegative(f64),
    #[error("unbound parameter `{0}`")]
    UnboundParam(String),
    #[error("point has {got} coordinates but expression uses `{var}`")]
    MissingCoordinate { var: &'static str, got: usize },
    #[error("expression evaluated to a non-finite value")]
    NonFinite,
}

pub fn eval(
    expr: &Expr,
    point: &[f64],
    params: &HashMap<String, f64>,
) -> Result<f64, EvalError> {
    let v = eval_inner(expr, point, params)?;
    if !v.is_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok(v)
}

fn eval_inner(
    expr: &Expr,
    point: &[f64],
    params: &HashMap<String, f64>,
) -> Result<f64, EvalError> {
    match expr {
        Expr::Num(v) => Ok(*v),
        Expr::Var(var) => point
            .get(var.index())
            .copied()
            .ok_or(EvalError::MissingCoordinate {
                var: var.name(),
                got: point.len(),
            }),
        Expr::Param(name) => params
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnboundParam(name.clone())),
        Expr::Neg(e) => Ok(-eval_inner(e, point, params)?),
        Expr::Bin(op, a, b) => {
            let a = eval_inner(a, point, params)?;
            let b = eval_inner(b, point, params)?;
            apply_bin(*op, a, b)
        }
        Expr::Call(f, args) => {
            let mut vals = [0.0; 2];
            for (i, arg) in args.iter().enumerate() {
                vals[i] = eval_inner(arg, point, params)?;
            }
            apply_func(*f, &vals[..args.len()])
        }
    }
}

pub(super) fn apply_bin(op: BinOp, a: f64, b: f64) -> Result<f64, EvalError> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div => {
            if b == 0.0 {
                Err(EvalError::DivisionByZero)
            } else {
                Ok(a / b)
            }
        }
        BinOp::Pow => pow(a, b),
    }
}

pub(super) fn pow(base: f64, exp: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exp < 0.0 {
        return Err(EvalError::ZeroBaseNegPow { exp });
    }
    if base < 0.0 {
        if exp.fract() != 0.0 {
            return Err(EvalError::NegBasePow { base, exp });
        }
        let sign = if exp.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        return Ok(sign * (-base).powf(exp));
    }
    Ok(base.powf(exp))
}

pub(super) fn apply_func(f: Func, args: &[f64]) -> Result<f64, EvalError> {
    Ok(match f {
        Func::Exp => args[0].exp(),
        Func::Log => {
            if args[0] <= 0.0 {
                return Err(EvalError::LogNonPositive(args[0]));
            }
            args[0].ln()
        }
        Func::Sin => args[0].sin(),
        Func::Cos => args[0].cos(),
        Func::Sqrt => {
            if args[0] < 0.0 {
                return Err(EvalError::SqrtNegative(args[0]));
            }
            args[0].sqrt()
        }
        Func::Abs => args[0].abs(),
        Func::Min => args[0].min(args[1]),
        Func::Max => args[0].max(args[1]),
    })
}
