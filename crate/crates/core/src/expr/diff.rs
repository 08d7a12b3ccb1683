use super::{Expr, Func};
use crate::error::{Error, Result};

/// Symbolic derivative with respect to `x`, simplified.
///
/// `abs` is rejected since the outer functions fed to the chain rule must be
/// continuously differentiable.
pub fn diff(e: &Expr) -> Result<Expr> {
    Ok(simplify(&raw_diff(e)?))
}

fn raw_diff(e: &Expr) -> Result<Expr> {
    use Expr::*;
    Ok(match e {
        Const(_) => Const(0.0),
        X => Const(1.0),
        Add(l, r) => Expr::add(raw_diff(l)?, raw_diff(r)?),
        Sub(l, r) => Expr::sub(raw_diff(l)?, raw_diff(r)?),
        Mul(l, r) => Expr::add(Expr::mul(raw_diff(l)?, (**r).clone()), Expr::mul((**l).clone(), raw_diff(r)?)),
        Div(l, r) => Expr::div(
            Expr::sub(Expr::mul(raw_diff(l)?, (**r).clone()), Expr::mul((**l).clone(), raw_diff(r)?)),
            Expr::pow((**r).clone(), Const(2.0)),
        ),
        Pow(base, exp) if !exp.mentions_x() => Expr::mul(
            Expr::mul((**exp).clone(), Expr::pow((**base).clone(), Expr::sub((**exp).clone(), Const(1.0)))),
            raw_diff(base)?,
        ),
        Pow(base, exp) if !base.mentions_x() => {
            Expr::mul(Expr::mul(e.clone(), Expr::call(Func::Ln, (**base).clone())), raw_diff(exp)?)
        }
        Pow(base, exp) => Expr::mul(
            e.clone(),
            Expr::add(
                Expr::mul(raw_diff(exp)?, Expr::call(Func::Ln, (**base).clone())),
                Expr::div(Expr::mul((**exp).clone(), raw_diff(base)?), (**base).clone()),
            ),
        ),
        Neg(inner) => Expr::neg(raw_diff(inner)?),
        Call(f, arg) => {
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => Expr::div(Const(1.0), (**arg).clone()),
                Func::Sin => Expr::call(Func::Cos, (**arg).clone()),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, (**arg).clone())),
                Func::Sqrt => Expr::div(Const(1.0), Expr::mul(Const(2.0), e.clone())),
                Func::Abs => return Err(Error::NotDifferentiable(format!("abs in `{e}`"))),
            };
            Expr::mul(outer, raw_diff(arg)?)
        }
    })
}

fn constant(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        _ => None,
    }
}

/// Algebraic clean-up: constant folding and the neutral-element rules.
pub fn simplify(e: &Expr) -> Expr {
    use Expr::*;
    let folded = match e {
        Const(_) | X => return e.clone(),
        Add(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match (constant(&l), constant(&r)) {
                (Some(0.0), _) => r,
                (_, Some(0.0)) => l,
                _ => Expr::add(l, r),
            }
        }
        Sub(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match (constant(&l), constant(&r)) {
                (_, Some(0.0)) => l,
                (Some(0.0), _) => simplify(&Expr::neg(r)),
                _ if l == r => Const(0.0),
                _ => Expr::sub(l, r),
            }
        }
        Mul(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match (constant(&l), constant(&r)) {
                (Some(0.0), _) | (_, Some(0.0)) => Const(0.0),
                (Some(1.0), _) => r,
                (_, Some(1.0)) => l,
                (Some(-1.0), _) => simplify(&Expr::neg(r)),
                (_, Some(-1.0)) => simplify(&Expr::neg(l)),
                _ => Expr::mul(l, r),
            }
        }
        Div(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match (constant(&l), constant(&r)) {
                (_, Some(1.0)) => l,
                (Some(0.0), Some(d)) if d != 0.0 => Const(0.0),
                _ => Expr::div(l, r),
            }
        }
        Pow(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match (constant(&l), constant(&r)) {
                (_, Some(0.0)) => Const(1.0),
                (_, Some(1.0)) => l,
                (Some(1.0), _) => Const(1.0),
                _ => Expr::pow(l, r),
            }
        }
        Neg(inner) => match simplify(inner) {
            Neg(i) => *i,
            Const(c) => Const(-c),
            i => Expr::neg(i),
        },
        Call(f, arg) => Expr::call(*f, simplify(arg)),
    };
    if !folded.mentions_x() && !matches!(folded, Const(_)) {
        if let Ok(v) = folded.eval(0.0) {
            if v.is_finite() {
                return Const(v);
            }
        }
    }
    folded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn d(s: &str) -> Expr {
        diff(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn power_rule_is_structural() {
        assert_eq!(d("x^2"), parse("2*x").unwrap());
        assert_eq!(d("7"), Expr::Const(0.0));
        assert_eq!(d("x"), Expr::Const(1.0));
        assert_eq!(d("3*x+1"), Expr::Const(3.0));
    }

    #[test]
    fn matches_closed_forms() {
        let de = d("exp(2*x)");
        for i in 0..20 {
            let x = -1.0 + 0.1 * i as f64;
            let want = 2.0 * (2.0 * x).exp();
            assert!((de.eval(x).unwrap() - want).abs() <= 1e-9 * want.abs());
        }
        let dl = d("ln(x^2+1)");
        assert!((dl.eval(2.0).unwrap() - 0.8).abs() < 1e-14);
        let dp = d("x^x");
        let x: f64 = 1.7;
        assert!((dp.eval(x).unwrap() - x.powf(x) * (x.ln() + 1.0)).abs() < 1e-12);
        let ds = d("sqrt(x)*cos(x)");
        let want = 0.5 / x.sqrt() * x.cos() - x.sqrt() * x.sin();
        assert!((ds.eval(x).unwrap() - want).abs() < 1e-13);
        let dq = d("1/(x+1)");
        assert!((dq.eval(1.0).unwrap() + 0.25).abs() < 1e-15);
        let de2 = d("2^x");
        assert!((de2.eval(3.0).unwrap() - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn abs_is_rejected() {
        assert!(matches!(diff(&parse("abs(x)+1").unwrap()), Err(Error::NotDifferentiable(_))));
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(simplify(&parse("2*3+x*1+0").unwrap()), parse("6+x").unwrap());
        assert_eq!(simplify(&parse("--x").unwrap()), Expr::X);
        assert_eq!(simplify(&parse("x-x").unwrap()), Expr::Const(0.0));
    }
}
