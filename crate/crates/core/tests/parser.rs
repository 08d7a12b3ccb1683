use chronoscale_core::{diff, parse, Error, Expr, Func};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ast(depth: u32) -> impl Strategy<Value = Expr> {
    // Nonnegative literals only: `-2` reads back as a negation.
    let leaf = prop_oneof![
        Just(Expr::X),
        (0u32..1000, 0u32..3).prop_map(|(n, k)| Expr::Const(n as f64 / 10f64.powi(k as i32)))
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::add(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::sub(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::mul(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::div(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::pow(l, r)),
            inner.clone().prop_map(Expr::neg),
            (prop::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, e)| Expr::call(f, e)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(e in ast(5)) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }
}

#[test]
fn fuzzed_inputs_parse_or_report_a_position() {
    const PIECES: [&str; 22] = [
        "x", "1", "2.5", "1e3", ".", "e", "+", "-", "*", "/", "^", "(", ")", " ", "exp", "ln", "sin(", "abs", "sqrt",
        ",", "é", "y",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut ok, mut err) = (0, 0);
    for _ in 0..10_000 {
        let n = rng.gen_range(0..24);
        let text: String = (0..n).map(|_| PIECES[rng.gen_range(0..PIECES.len())]).collect();
        match parse(&text) {
            Ok(e) => {
                ok += 1;
                assert_eq!(parse(&e.to_string()).unwrap(), e, "{text}");
            }
            Err(p) => {
                err += 1;
                assert!(p.offset <= text.len(), "{text}: {p}");
            }
        }
    }
    assert!(ok > 20 && err > 1000, "ok {ok}, err {err}");
    let deep = format!("{}x{}", "(".repeat(100_000), ")".repeat(100_000));
    assert!(parse(&deep).is_err());
}

#[test]
fn syntax_error_offsets() {
    assert_eq!(parse("x^^2").unwrap_err().offset, 2);
    assert_eq!(parse("").unwrap_err().offset, 0);
    assert_eq!(parse("sin x").unwrap_err().offset, 4);
}

fn random_ast(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth <= 1 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) { Expr::X } else { Expr::Const(rng.gen_range(0.5..3.0)) };
    }
    let mut sub = || random_ast(rng, depth - 1);
    let (l, r) = (sub(), sub());
    match rng.gen_range(0..8) {
        0 => Expr::add(l, r),
        1 => Expr::sub(l, r),
        2 => Expr::mul(l, r),
        3 => Expr::div(l, Expr::add(Expr::Const(2.0), Expr::call(Func::Sin, r))),
        4 => Expr::pow(Expr::call(Func::Exp, Expr::call(Func::Sin, l)), Expr::Const(rng.gen_range(0.5..2.5))),
        5 => Expr::call(Func::Exp, Expr::call(Func::Cos, l)),
        6 => Expr::call(Func::Ln, Expr::add(Expr::Const(1.5), Expr::call(Func::Sin, l))),
        _ => Expr::call(Func::Sqrt, Expr::add(Expr::Const(1.0), Expr::mul(l.clone(), l))),
    }
}

#[test]
fn symbolic_derivative_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 100 {
        let e = random_ast(&mut rng, 5);
        let d = diff(&e).unwrap();
        for _ in 0..10 {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let h = 1e-5 * (1.0 + x.abs());
            let (Ok(hi), Ok(lo), Ok(exact)) = (e.eval(x + h), e.eval(x - h), d.eval(x)) else { continue };
            let central = (hi - lo) / (2.0 * h);
            // Round-off in the difference quotient scales with |f| / h.
            let noise = 1e-15 * (hi.abs() + lo.abs()) / h;
            assert!(
                (central - exact).abs() <= 1e-6 * (1.0 + exact.abs()) + noise,
                "d/dx {e} at {x}: {exact} vs {central}"
            );
        }
        checked += 1;
    }
}

#[test]
fn abs_has_no_derivative() {
    assert!(matches!(diff(&parse("abs(x)+1").unwrap()), Err(Error::NotDifferentiable(_))));
}
