//! Precedence-aware printer. `format!("{expr}")` produces a string that
//! reparses to the identical tree, with parentheses only where the
//! grammar requires them.

use std::fmt;

use super::{BinOp, Expr};

// Precedence levels mirror the grammar: Add/Sub 1, Mul/Div 2, unary
// minus 3, Pow 4, atoms 5.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        Expr::Num(_) | Expr::Var(_) | Expr::Param(_) | Expr::Call(..) => 5,
    }
}

fn op_str(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => " + ",
        BinOp::Sub => " - ",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Pow => "^",
    }
}

fn fmt_child(e: &Expr, f: &mut fmt::Formatter<'_>, needs_parens: bool) -> fmt::Result {
    if needs_parens {
        write!(f, "(")?;
        fmt_expr(e, f)?;
        write!(f, ")")
    } else {
        fmt_expr(e, f)
    }
}

pub(super) fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(v) => write!(f, "{}", v.name()),
        Expr::Param(p) => write!(f, "{p}"),
        Expr::Neg(inner) => {
            write!(f, "-")?;
            // the operand of unary minus sits at power level
            fmt_child(inner, f, prec(inner) < 3)
        }
        Expr::Bin(op, a, b) => match op {
            BinOp::Pow => {
                // right-associative: a left child at Pow or Neg level
                // would rebind, the right child may be Neg or Pow
                fmt_child(a, f, prec(a) <= 4)?;
                write!(f, "^")?;
                fmt_child(b, f, prec(b) < 3)
            }
            _ => {
                let p = prec(e);
                fmt_child(a, f, prec(a) < p)?;
                write!(f, "{}", op_str(*op))?;
                fmt_child(b, f, prec(b) <= p)
            }
        },
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                fmt_expr(a, f)?;
            }
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::dsl::{parse, BinOp, Expr, Func, Var};

    fn roundtrip(src: &str) -> String {
        let e = parse(src).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "printed: {printed}");
        printed
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip("(x^2-1)^2 + y^2"), "(x^2 - 1)^2 + y^2");
        assert_eq!(roundtrip("1+2*3"), "1 + 2*3");
        assert_eq!(roundtrip("(1+2)*3"), "(1 + 2)*3");
        assert_eq!(roundtrip("-x^2"), "-x^2");
        assert_eq!(roundtrip("(-x)^2"), "(-x)^2");
        assert_eq!(roundtrip("x^(2^3)"), "x^2^3");
        assert_eq!(roundtrip("(x^2)^3"), "(x^2)^3");
        assert_eq!(roundtrip("x^-2"), "x^-2");
        assert_eq!(roundtrip("a - (b - c)"), "a - (b - c)");
        assert_eq!(roundtrip("a - b - c"), "a - b - c");
        assert_eq!(roundtrip("a/(b*c)"), "a/(b*c)");
        assert_eq!(roundtrip("min(x, max(y, 1))"), "min(x, max(y, 1))");
    }

    #[test]
    fn structure_preserved_even_where_value_agrees() {
        // a+(b+c) and (a+b)+c evaluate identically but are different
        // trees; the printer must keep them distinct.
        let right = parse("a + (b + c)").unwrap();
        let left = parse("a + b + c").unwrap();
        assert_ne!(right, left);
        assert_eq!(parse(&right.to_string()).unwrap(), right);
        assert_eq!(parse(&left.to_string()).unwrap(), left);
    }

    #[test]
    fn derivative_trees_roundtrip() {
        let e = parse("exp(-x^2/sigma)*sin(4*y)^2 + mu*y^4").unwrap();
        for var in [Var::X, Var::Y] {
            let de = crate::dsl::differentiate(&e, var).expr;
            assert_eq!(parse(&de.to_string()).unwrap(), de);
        }
    }

    #[test]
    fn synthetic_trees_roundtrip() {
        // a few hand-built trees that exercise awkward printing corners
        let b = Box::new;
        let cases = [
            Expr::Neg(b(Expr::Neg(b(Expr::Var(Var::X))))),
            Expr::Bin(
                BinOp::Pow,
                b(Expr::Neg(b(Expr::Num(2.0)))),
                b(Expr::Num(2.0)),
            ),
            Expr::Bin(
                BinOp::Sub,
                b(Expr::Num(1.0)),
                b(Expr::Neg(b(Expr::Var(Var::Y)))),
            ),
            Expr::Bin(
                BinOp::Mul,
                b(Expr::Call(Func::Abs, vec![Expr::Var(Var::X)])),
                b(Expr::Neg(b(Expr::Num(3.0)))),
            ),
        ];
        for e in cases {
            assert_eq!(parse(&e.to_string()).unwrap(), e, "printed: {e}");
        }
    }
}
