//! Single-variable expressions: AST, evaluation, printing, parsing and
//! symbolic differentiation.

mod diff;
mod parser;

use std::fmt;

use crate::error::{Error, Result};

pub use diff::{diff, simplify};
pub use parser::{parse, ParseError, MAX_NESTING};

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Exp, Func::Ln, Func::Sin, Func::Cos, Func::Abs, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> Result<f64> {
        match self {
            Func::Exp => Ok(v.exp()),
            Func::Ln if v <= 0.0 => Err(Error::EvalDomain(format!("ln of nonpositive value {v}"))),
            Func::Ln => Ok(v.ln()),
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Abs => Ok(v.abs()),
            Func::Sqrt if v < 0.0 => Err(Error::EvalDomain(format!("sqrt of negative value {v}"))),
            Func::Sqrt => Ok(v.sqrt()),
        }
    }
}

/// Expression tree over the single variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    X,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::Add(Box::new(l), Box::new(r))
    }
    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::Sub(Box::new(l), Box::new(r))
    }
    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::Mul(Box::new(l), Box::new(r))
    }
    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::Div(Box::new(l), Box::new(r))
    }
    pub fn pow(l: Expr, r: Expr) -> Expr {
        Expr::Pow(Box::new(l), Box::new(r))
    }
    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }
    pub fn call(f: Func, e: Expr) -> Expr {
        Expr::Call(f, Box::new(e))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::X => x,
            Expr::Add(l, r) => l.eval(x)? + r.eval(x)?,
            Expr::Sub(l, r) => l.eval(x)? - r.eval(x)?,
            Expr::Mul(l, r) => l.eval(x)? * r.eval(x)?,
            Expr::Div(l, r) => {
                let d = r.eval(x)?;
                if d == 0.0 {
                    return Err(Error::EvalDomain(format!("division by zero at x = {x}")));
                }
                l.eval(x)? / d
            }
            Expr::Pow(l, r) => {
                let (b, e) = (l.eval(x)?, r.eval(x)?);
                if b < 0.0 && e.fract() != 0.0 {
                    return Err(Error::EvalDomain(format!("{b} raised to non-integer power {e}")));
                }
                if b == 0.0 && e < 0.0 {
                    return Err(Error::EvalDomain(format!("zero raised to negative power {e}")));
                }
                b.powf(e)
            }
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Call(f, e) => f.apply(e.eval(x)?)?,
        };
        if v.is_nan() {
            return Err(Error::EvalDomain(format!("undefined value at x = {x}")));
        }
        Ok(v)
    }

    /// True when the expression depends on `x`.
    pub fn mentions_x(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::X => true,
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) | Expr::Pow(l, r) => {
                l.mentions_x() || r.mentions_x()
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.mentions_x(),
        }
    }

    /// Replace every `x` by `inner`, giving `self ∘ inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        let go = |e: &Expr| Box::new(e.substitute(inner));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::X => inner.clone(),
            Expr::Add(l, r) => Expr::Add(go(l), go(r)),
            Expr::Sub(l, r) => Expr::Sub(go(l), go(r)),
            Expr::Mul(l, r) => Expr::Mul(go(l), go(r)),
            Expr::Div(l, r) => Expr::Div(go(l), go(r)),
            Expr::Pow(l, r) => Expr::Pow(go(l), go(r)),
            Expr::Neg(e) => Expr::Neg(go(e)),
            Expr::Call(f, e) => Expr::Call(*f, go(e)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::X => 1,
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) | Expr::Pow(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.depth(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::X | Expr::Call(..) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimum parentheses needed for `parse` to rebuild the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr, level: u8| {
            write_child(f, l, l.precedence() < level)?;
            write!(f, "{op}")?;
            write_child(f, r, r.precedence() <= level)
        };
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => write!(f, "x"),
            Expr::Add(l, r) => binary(f, l, "+", r, 1),
            Expr::Sub(l, r) => binary(f, l, "-", r, 1),
            Expr::Mul(l, r) => binary(f, l, "*", r, 2),
            Expr::Div(l, r) => binary(f, l, "/", r, 2),
            Expr::Pow(l, r) => {
                write_child(f, l, l.precedence() <= 4)?;
                write!(f, "^")?;
                write_child(f, r, r.precedence() < 3)
            }
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_child(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}
