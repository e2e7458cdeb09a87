//! Arithmetic expression DSL for defining potentials F(x, y[, z]).
//!
//! Grammar (EBNF, whitespace-insensitive):
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | power
//! power   := atom [ "^" unary ]            (right-associative)
//! atom    := number | ident [ "(" expr { "," expr } ")" ] | "(" expr ")"
//! ident   := letter { letter | digit | "_" }
//! ```
//!
//! `x`, `y`, `z` are coordinates; any other bare identifier is a
//! parameter bound at load time. Functions: `exp`, `log`, `sin`, `cos`,
//! `sqrt`, `abs` (unary), `min`, `max` (binary). `log` is the natural
//! logarithm.

mod diff;
mod eval;
mod parse;
mod print;

pub use diff::{differentiate, Derivative};
pub use eval::{eval, EvalError};
pub use parse::{parse, ParseError};

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }

    pub fn from_index(i: usize) -> Var {
        match i {
            0 => Var::X,
            1 => Var::Y,
            2 => Var::Z,
            _ => panic!("variable index {i} out of range"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

/// Abstract syntax tree of a potential expression. Numeric literals are
/// always nonnegative; negative constants appear as `Neg(Num(..))` so
/// printing and reparsing is the identity on the tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk_vars(&mut out);
        out
    }

    fn walk_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Num(_) | Expr::Param(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) => e.walk_vars(out),
            Expr::Bin(_, a, b) => {
                a.walk_vars(out);
                b.walk_vars(out);
            }
            Expr::Call(_, args) => {
                for a in args {
                    a.walk_vars(out);
                }
            }
        }
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_params(&mut out);
        out
    }

    fn walk_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Neg(e) => e.walk_params(out),
            Expr::Bin(_, a, b) => {
                a.walk_params(out);
                b.walk_params(out);
            }
            Expr::Call(_, args) => {
                for a in args {
                    a.walk_params(out);
                }
            }
        }
    }

    /// Replaces every occurrence of `var` by `replacement`.
    pub fn substitute(&self, var: Var, replacement: &Expr) -> Expr {
        match self {
            Expr::Num(_) | Expr::Param(_) => self.clone(),
            Expr::Var(v) => {
                if *v == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(var, replacement))),
            Expr::Bin(op, a, b) => Expr::Bin(
                *op,
                Box::new(a.substitute(var, replacement)),
                Box::new(b.substitute(var, replacement)),
            ),
            Expr::Call(f, args) => Expr::Call(
                *f,
                args.iter().map(|a| a.substitute(var, replacement)).collect(),
            ),
        }
    }

    /// Replaces a parameter by a fixed value.
    pub fn bind_param(&self, name: &str, value: f64) -> Expr {
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Param(p) => {
                if p == name {
                    diff::num(value)
                } else {
                    self.clone()
                }
            }
            Expr::Neg(e) => Expr::Neg(Box::new(e.bind_param(name, value))),
            Expr::Bin(op, a, b) => Expr::Bin(
                *op,
                Box::new(a.bind_param(name, value)),
                Box::new(b.bind_param(name, value)),
            ),
            Expr::Call(f, args) => Expr::Call(
                *f,
                args.iter().map(|a| a.bind_param(name, value)).collect(),
            ),
        }
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        print::fmt_expr(self, f)
    }
}
