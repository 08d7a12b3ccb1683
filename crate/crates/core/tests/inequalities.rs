use chronoscale_core::inequalities::{check, check_akkouchi_ts, check_qi, check_yin_qi_strict};
use chronoscale_core::search::{gen_inadmissible, gen_scale};
use chronoscale_core::{
    CheckConfig, GenConfig, Instance, Outcome, ScaleFunction, Segment, Tabulation, TheoremId, TimeScale,
};

fn f(s: &str) -> ScaleFunction {
    ScaleFunction::parse(s).unwrap()
}

/// Composite 5-point Gauss-Legendre rule.
fn gauss(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] =
        [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            X.iter().zip(W).map(|(&x, w)| w * g(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

#[test]
fn akkouchi_lattice_instance() {
    let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
    let v = check_akkouchi_ts(&t, 0.0, 3.0, &CheckConfig::default(), &f("2*x+1"), 1.0).unwrap();
    assert_eq!((v.lhs, v.rhs), (153.0, 81.0));
    assert_eq!(v.outcome, Outcome::Holds);
    assert!(v.hypotheses.iter().all(|h| h.satisfied && h.margin >= 0.0), "{:?}", v.hypotheses);
}

#[test]
fn yin_qi_unit_interval_instance() {
    let t = TimeScale::interval(0.0, 1.0).unwrap();
    let v = check_yin_qi_strict(&t, 0.0, 1.0, &CheckConfig::default(), &f("x/2"), 2.0).unwrap();
    assert!((v.lhs - 1.0 / 16.0).abs() < 1e-8 && (v.rhs - 1.0 / 32.0).abs() < 1e-8);
    assert!((v.slack - 1.0 / 32.0).abs() < 1e-8);
    assert_eq!(v.outcome, Outcome::Holds);
}

#[test]
fn qi_on_an_interval_matches_classical_quadrature() {
    let t = TimeScale::interval(0.0, 1.0).unwrap();
    for (text, p, g) in [("1+x", 2.0, (|x: f64| 1.0 + x) as fn(f64) -> f64), ("exp(x)", 3.0, f64::exp)] {
        let v = check_qi(&t, 0.0, 1.0, &CheckConfig::default(), &f(text), p).unwrap();
        let lhs = gauss(|x| g(x).powf(p), 0.0, 1.0, 64);
        let rhs = gauss(g, 0.0, 1.0, 64).powf(p - 1.0);
        assert!((v.lhs - lhs).abs() < 1e-6 && (v.rhs - rhs).abs() < 1e-6, "{text}: {v:?}");
        assert_eq!(v.outcome, Outcome::Holds);
    }
}

#[test]
fn yin_qi_on_an_interval_matches_classical_quadrature() {
    let t = TimeScale::interval(0.0, 2.0).unwrap();
    let g = |x: f64| x / 2.0 + x * x / 20.0;
    for p in [1.5, 2.0, 3.0] {
        let v = check_yin_qi_strict(&t, 0.0, 2.0, &CheckConfig::default(), &f("x/2 + x^2/20"), p).unwrap();
        let lhs = gauss(g, 0.0, 2.0, 64).powf(p);
        let rhs = 2f64.powf(1.0 - p) * p * gauss(|x| g(x).powf(2.0 * p - 1.0), 0.0, 2.0, 64);
        assert!((v.lhs - lhs).abs() < 1e-6 && (v.rhs - rhs).abs() < 1e-6, "p = {p}: {v:?}");
        assert_eq!(v.outcome, Outcome::Holds);
    }
}

/// Three points with a long first gap: every sampled hypothesis holds, yet
/// the strict inequality fails by a wide margin.
#[test]
fn yin_qi_fails_on_a_three_point_scale() {
    let t = TimeScale::new([0.0, 3.0, 3.01].map(|p| Segment::point(p).unwrap())).unwrap();
    let tab = Tabulation::on_scale(&t, vec![(0.0, 0.0), (3.0, 1.5), (3.01, 1.505)]).unwrap();
    let v = check_yin_qi_strict(&t, 0.0, 3.01, &CheckConfig::default(), &ScaleFunction::tabulated(tab), 2.0).unwrap();
    assert!(v.applicable, "{:?}", v.hypotheses);
    assert!((v.lhs - 0.015f64.powi(2)).abs() < 1e-15);
    assert!((v.rhs - 0.01 * 1.5f64.powi(3)).abs() < 1e-15);
    assert_eq!(v.outcome, Outcome::Violated);
}

#[test]
fn inadmissible_instances_are_never_violations() {
    let cfg = GenConfig::with_seed(23);
    for theorem in TheoremId::ALL {
        for i in 0..50 {
            let t = gen_scale(&cfg, i);
            let inst = gen_inadmissible(theorem, &t, &cfg, i).unwrap();
            let v = inst.replay().unwrap();
            assert_eq!(v.outcome, Outcome::NotApplicable, "{theorem} trial {i}: {:?}", v.hypotheses);
            assert_eq!(v.holds, None);
        }
    }
}

#[test]
fn dispatch_matches_direct_calls() {
    let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
    let cfg = CheckConfig::default();
    let inst = Instance::new(TheoremId::Akkouchi, f("2*x+1"), 1.0);
    let direct = check_akkouchi_ts(&t, 0.0, 3.0, &cfg, &inst.f, 1.0).unwrap();
    assert_eq!(check(&t, 0.0, 3.0, &cfg, &inst).unwrap(), direct);
    let holder = Instance::new(TheoremId::Holder, f("x"), 2.0);
    assert!(check(&t, 0.0, 3.0, &cfg, &holder).is_err());
}
