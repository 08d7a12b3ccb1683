use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::function::{FunctionSpec, ScaleFunction, Tabulation};
use crate::inequalities::{BoundsPair, TheoremId, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::scale::{Segment, TimeScale};

use super::{FunctionFamily, GenConfig, ReplayInstance};

const SCALE_STREAM: u64 = 0;
const FUNCTION_STREAM: u64 = 1;

/// Random bounded time scale for trial `index`: a positive offset followed by
/// dense segments, arithmetic clusters and geometric clusters separated by
/// random gaps.
pub fn gen_scale(cfg: &GenConfig, index: u64) -> TimeScale {
    let mut rng = cfg.rng(index, SCALE_STREAM);
    let span = cfg.domain_span;
    let (lo, hi) = cfg.n_segments;
    let pieces = rng.gen_range(lo.max(1)..=hi.max(lo).max(1));
    let mut x = span * rng.gen_range(0.025..0.25);
    let mut segs = Vec::new();
    for i in 0..pieces {
        if i > 0 {
            x += span * rng.gen_range(0.02..0.2);
        }
        if rng.gen_bool(cfg.dense_fraction) {
            let len = span * rng.gen_range(0.05..0.3);
            segs.push(Segment { lo: x, hi: x + len });
            x += len;
        } else if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=5);
            let h = span * rng.gen_range(0.01..0.15);
            for j in 0..k {
                segs.push(Segment { lo: x + j as f64 * h, hi: x + j as f64 * h });
            }
            x += (k - 1) as f64 * h;
        } else {
            let k = rng.gen_range(2..=5);
            let q: f64 = rng.gen_range(1.2..2.5);
            let c = span * rng.gen_range(0.005..0.05);
            let start = x;
            for j in 0..k {
                x = start + c * (q.powi(j) - 1.0);
                segs.push(Segment { lo: x, hi: x });
            }
        }
    }
    if segs.len() == 1 && segs[0].is_point() {
        segs.push(Segment { lo: x + 0.1 * span, hi: x + 0.1 * span });
    }
    TimeScale::new(segs).expect("generated segments are finite and nonempty")
}

fn knots(scale: &TimeScale) -> Vec<f64> {
    scale.scale_points_per_segment(DEFAULT_SAMPLES_PER_SEGMENT)
}

fn coef(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    // Rounded so the printed expression is short and exact.
    (rng.gen_range(lo..hi) * 1e6).round() / 1e6
}

/// A function positive on `[min T, max T]` (the generated scales are
/// positive).
fn positive_function(rng: &mut ChaCha8Rng, scale: &TimeScale, family: FunctionFamily) -> FunctionSpec {
    match family {
        FunctionFamily::Polynomial => {
            let (c0, c1, c2) = (coef(rng, 0.2, 2.0), coef(rng, 0.0, 1.0), coef(rng, 0.0, 0.5));
            FunctionSpec::Expr(format!("{c0}+{c1}*x+{c2}*x^2"))
        }
        FunctionFamily::ExpMix => {
            let (c0, c1) = (coef(rng, 0.1, 2.0), coef(rng, 0.1, 2.0));
            let (k0, k1) = (coef(rng, 0.05, 0.6), coef(rng, 0.05, 0.6));
            FunctionSpec::Expr(format!("{c0}*exp({k0}*x)+{c1}*exp(-{k1}*x)"))
        }
        FunctionFamily::CumulativeConstruction => {
            let mut v: f64 = rng.gen_range(0.3..2.0);
            let points = knots(scale)
                .into_iter()
                .map(|t| {
                    let here = v;
                    v *= rng.gen_range(-0.15f64..0.15).exp();
                    (t, here)
                })
                .collect();
            FunctionSpec::Table(Tabulation::on_scale(scale, points).expect("knots lie in the scale"))
        }
    }
}

/// Any function, possibly sign-changing.
fn signed_function(rng: &mut ChaCha8Rng, scale: &TimeScale, family: FunctionFamily) -> FunctionSpec {
    if family == FunctionFamily::Polynomial && rng.gen_bool(0.5) {
        let (c0, c1, c2) = (coef(rng, -1.0, 1.0), coef(rng, -1.0, 1.0), coef(rng, -0.5, 0.5));
        return FunctionSpec::Expr(format!("{c0}+({c1})*x+({c2})*x^2"));
    }
    positive_function(rng, scale, family)
}

fn scaled(spec: &FunctionSpec, c: f64) -> FunctionSpec {
    match spec {
        FunctionSpec::Expr(text) => FunctionSpec::Expr(format!("{c:?}*({text})")),
        FunctionSpec::Table(t) => FunctionSpec::Table(
            Tabulation::on_scale(t.scale(), t.points().map(|(x, y)| (x, c * y)).collect()).expect("same knots"),
        ),
    }
}

fn integral(spec: &FunctionSpec, scale: &TimeScale, tol: f64) -> Result<f64> {
    let f = spec.build()?;
    Ok(crate::calculus::delta_integral(&f, scale, scale.min(), scale.max(), tol)?.value)
}

/// Sampled range of `ratio` on the check grid, widened by a random factor.
fn bounds_for(rng: &mut ChaCha8Rng, scale: &TimeScale, ratio: &ScaleFunction) -> Result<BoundsPair> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in knots(scale) {
        let r = ratio.eval(t)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let w = 1.0 + rng.gen_range(0.0..0.3);
    BoundsPair::new(lo / w, hi * w)
}

fn p_high(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> f64 {
    let (lo, hi) = cfg.p_range;
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

fn p_either(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> f64 {
    if rng.gen_bool(0.3) {
        -rng.gen_range(0.2..3.0)
    } else {
        p_high(rng, cfg)
    }
}

/// Tabulation with `f(a) = f0` and increments `step(t, σ(t))` between
/// consecutive knots.
fn cumulative(scale: &TimeScale, f0: f64, mut step: impl FnMut(f64, f64) -> f64) -> FunctionSpec {
    let ts = knots(scale);
    let mut v = f0;
    let mut points = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        points.push((t, v));
        if let Some(&next) = ts.get(i + 1) {
            v += step(t, next);
        }
    }
    FunctionSpec::Table(Tabulation::on_scale(scale, points).expect("knots lie in the scale"))
}

/// `f(a) = μ(a) + r` and `f^Δ = 1 + σ^Δ + u` with `r, u ≥ 0` random.
fn akkouchi_function(rng: &mut ChaCha8Rng, scale: &TimeScale) -> Result<FunctionSpec> {
    let a = scale.min();
    let mu_a = scale.mu(a)?;
    let extra = if rng.gen_bool(0.2) && mu_a > 0.0 { 0.0 } else { rng.gen_range(0.05..1.0) };
    let mut err = None;
    let spec = cumulative(scale, mu_a + extra, |t, next| {
        let u = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) };
        let h = next - t;
        let dense = scale.segment_index(t) == scale.segment_index(next);
        let sigma_delta = if dense {
            1.0
        } else {
            match scale.sigma(next) {
                Ok(s) => (s - next) / h,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        h * (1.0 + sigma_delta + u)
    });
    match err {
        Some(e) => Err(e),
        None => Ok(spec),
    }
}

/// `f(a) = 0` and `f^Δ ∈ (0.05, 0.95)`.
fn yin_qi_function(rng: &mut ChaCha8Rng, scale: &TimeScale) -> FunctionSpec {
    cumulative(scale, 0.0, |t, next| (next - t) * rng.gen_range(0.05..0.95))
}

fn base(theorem: TheoremId, scale: &TimeScale, cfg: &GenConfig) -> ReplayInstance {
    ReplayInstance {
        theorem,
        scale: scale.clone(),
        a: scale.min(),
        b: scale.max(),
        f: FunctionSpec::Expr("1".into()),
        g: None,
        p: 2.0,
        q: None,
        bounds: None,
        equality_case: false,
        check: cfg.check,
    }
}

/// An instance on `[min T, max T]` satisfying the theorem's hypotheses by
/// construction. About one in four Hölder-type instances is an equality case.
pub fn gen_admissible(theorem: TheoremId, scale: &TimeScale, cfg: &GenConfig, index: u64) -> Result<ReplayInstance> {
    let mut rng = cfg.rng(index, FUNCTION_STREAM);
    let fam = cfg.function_family;
    let mut inst = base(theorem, scale, cfg);
    match theorem {
        TheoremId::Holder | TheoremId::RatioHolder if rng.gen_bool(0.25) => {
            return gen_equality_case(theorem, scale, cfg, index);
        }
        TheoremId::Holder => {
            inst.p = p_high(&mut rng, cfg);
            inst.f = signed_function(&mut rng, scale, fam);
            inst.g = Some(signed_function(&mut rng, scale, fam));
        }
        TheoremId::RatioHolder => {
            inst.p = p_either(&mut rng, cfg);
            inst.f = positive_function(&mut rng, scale, fam);
            inst.g = Some(positive_function(&mut rng, scale, fam));
        }
        TheoremId::BoundedRatio | TheoremId::PowerBounded => {
            inst.p = p_high(&mut rng, cfg);
            inst.f = positive_function(&mut rng, scale, fam);
            let g = positive_function(&mut rng, scale, fam);
            if rng.gen_bool(0.5) {
                let (f, gf) = (inst.f.build()?, g.build()?);
                let q = inst.p / (inst.p - 1.0);
                let p = inst.p;
                let ratio = if theorem == TheoremId::BoundedRatio {
                    f.zip_with(&gf, "ratio", |u, v| Ok(u / v))
                } else {
                    f.zip_with(&gf, "ratio", move |u, v| Ok(u.powf(p) / v.powf(q)))
                };
                inst.bounds = Some(bounds_for(&mut rng, scale, &ratio)?);
            }
            inst.g = Some(g);
        }
        TheoremId::PmBound => {
            inst.p = p_high(&mut rng, cfg);
            inst.f = positive_function(&mut rng, scale, fam);
            if rng.gen_bool(0.5) {
                let p = inst.p;
                let fp = inst.f.build()?.map("pow", move |v| Ok(v.powf(p)));
                inst.bounds = Some(bounds_for(&mut rng, scale, &fp)?);
            }
        }
        TheoremId::Qi => {
            inst.p = p_either(&mut rng, cfg);
            let f0 = positive_function(&mut rng, scale, fam);
            let slack = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..2.0) };
            let target = (inst.b - inst.a).powf(inst.p - 1.0) * (1.0 + slack);
            inst.f = scaled(&f0, target / integral(&f0, scale, cfg.check.quad_tol)?);
        }
        TheoremId::Akkouchi => {
            let (lo, hi) = cfg.p_range;
            inst.p = rng.gen_range(1.0..hi.max(lo));
            inst.f = akkouchi_function(&mut rng, scale)?;
        }
        TheoremId::YinQi => {
            inst.p = p_high(&mut rng, cfg);
            inst.f = yin_qi_function(&mut rng, scale);
        }
    }
    Ok(inst)
}

/// Equality case: `|f|^p = c|g|^q` for Hölder, `f = c·g` for the ratio form.
pub fn gen_equality_case(theorem: TheoremId, scale: &TimeScale, cfg: &GenConfig, index: u64) -> Result<ReplayInstance> {
    let mut rng = cfg.rng(index, FUNCTION_STREAM + 2);
    let mut inst = base(theorem, scale, cfg);
    inst.equality_case = true;
    // A power of a piecewise-linear table is not piecewise linear, so the
    // Hölder equality case always uses an expression.
    let family = match (theorem, cfg.function_family) {
        (TheoremId::Holder, FunctionFamily::CumulativeConstruction) => FunctionFamily::Polynomial,
        (_, fam) => fam,
    };
    let g = positive_function(&mut rng, scale, family);
    let c = coef(&mut rng, 0.1, 5.0);
    match theorem {
        TheoremId::Holder => {
            inst.p = p_high(&mut rng, cfg);
            let e = 1.0 / (inst.p - 1.0);
            let FunctionSpec::Expr(text) = &g else { unreachable!("expression family") };
            inst.f = FunctionSpec::Expr(format!("{c}*({text})^{e:?}"));
        }
        _ => {
            inst.theorem = TheoremId::RatioHolder;
            inst.p = p_either(&mut rng, cfg);
            inst.f = scaled(&g, c);
        }
    }
    inst.g = Some(g);
    Ok(inst)
}

/// An instance violating at least one hypothesis of the theorem. The broken
/// hypothesis rotates with `index`.
pub fn gen_inadmissible(theorem: TheoremId, scale: &TimeScale, cfg: &GenConfig, index: u64) -> Result<ReplayInstance> {
    let mut rng = cfg.rng(index, FUNCTION_STREAM + 1);
    let fam = cfg.function_family;
    let mut inst = gen_admissible(theorem, scale, cfg, index)?;
    inst.equality_case = false;
    let variant = index % 2;
    let negate = |spec: &FunctionSpec| scaled(spec, -1.0);
    match (theorem, variant) {
        (TheoremId::Holder, _) => {
            inst.p = rng.gen_range(0.1..0.9);
            inst.g.get_or_insert_with(|| positive_function(&mut rng, scale, fam));
        }
        (TheoremId::RatioHolder, 0) => inst.p = rng.gen_range(0.1..0.9),
        (TheoremId::RatioHolder, _) => inst.f = negate(&inst.f),
        (TheoremId::BoundedRatio | TheoremId::PowerBounded | TheoremId::PmBound, 0) => {
            let f = inst.f.build()?;
            let ratio = match (theorem, &inst.g) {
                (TheoremId::PmBound, _) | (_, None) => {
                    let p = inst.p;
                    f.map("pow", move |v| Ok(v.powf(p)))
                }
                (TheoremId::BoundedRatio, Some(g)) => f.zip_with(&g.build()?, "ratio", |u, v| Ok(u / v)),
                (_, Some(g)) => {
                    let (p, q) = (inst.p, inst.p / (inst.p - 1.0));
                    f.zip_with(&g.build()?, "ratio", move |u, v| Ok(u.powf(p) / v.powf(q)))
                }
            };
            let b = bounds_for(&mut rng, scale, &ratio)?;
            // Tighten the upper bound below the largest sample.
            let hi_ratio = knots(scale).into_iter().filter_map(|t| ratio.eval(t).ok()).fold(0.0, f64::max);
            let m = b.m.min(hi_ratio * 0.5);
            inst.bounds = Some(BoundsPair::new(m, (hi_ratio * 0.9).max(m))?);
        }
        (TheoremId::BoundedRatio | TheoremId::PowerBounded | TheoremId::PmBound, _) => inst.f = negate(&inst.f),
        (TheoremId::Qi, 0) => {
            inst.p = p_high(&mut rng, cfg);
            let f0 = positive_function(&mut rng, scale, fam);
            let target = (inst.b - inst.a).powf(inst.p - 1.0) * rng.gen_range(0.2..0.9);
            inst.f = scaled(&f0, target / integral(&f0, scale, cfg.check.quad_tol)?);
        }
        (TheoremId::Qi, _) => inst.p = rng.gen_range(0.1..0.9),
        (TheoremId::Akkouchi, 0) => {
            // Start below the graininess (or at zero on a dense start).
            let a = inst.a;
            let mu_a = scale.mu(a)?;
            let target = mu_a - rng.gen_range(0.05..0.5) * (1.0 + mu_a);
            inst.f = shift(&inst.f, target - inst.f.build()?.eval(a)?, a);
        }
        (TheoremId::Akkouchi, _) => inst.p = rng.gen_range(0.1..0.95),
        (TheoremId::YinQi, v) if v == 0 || !has_interior_point(scale, inst.a, inst.b) => {
            inst.f = shift(&inst.f, rng.gen_range(0.05..1.0), inst.a)
        }
        (TheoremId::YinQi, _) => {
            inst.f = cumulative(scale, 0.0, |t, next| (next - t) * rng.gen_range(1.05..2.0));
        }
    }
    Ok(inst)
}

/// Whether the slope condition on `(a, b)` has anything to sample.
fn has_interior_point(scale: &TimeScale, a: f64, b: f64) -> bool {
    knots(scale).into_iter().any(|t| t > a && t < b)
}

/// Add `c` to the value at `at` and every later knot of a tabulation (or to an
/// expression everywhere).
fn shift(spec: &FunctionSpec, c: f64, at: f64) -> FunctionSpec {
    match spec {
        FunctionSpec::Expr(text) => FunctionSpec::Expr(format!("{text}+({c:?})")),
        FunctionSpec::Table(t) => FunctionSpec::Table(
            Tabulation::on_scale(t.scale(), t.points().map(|(x, y)| (x, if x >= at { y + c } else { y })).collect())
                .expect("same knots"),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::Outcome;

    #[test]
    fn scale_generation_is_deterministic() {
        let cfg = GenConfig::with_seed(7);
        for i in 0..20 {
            assert_eq!(gen_scale(&cfg, i), gen_scale(&cfg, i));
        }
        assert_ne!(gen_scale(&cfg, 0), gen_scale(&cfg, 1));
    }

    #[test]
    fn extreme_dense_fractions() {
        let cfg = GenConfig { dense_fraction: 0.0, ..GenConfig::with_seed(3) };
        for i in 0..20 {
            assert!(gen_scale(&cfg, i).is_discrete());
        }
        let cfg = GenConfig { dense_fraction: 1.0, n_segments: (1, 1), ..GenConfig::with_seed(3) };
        for i in 0..20 {
            let t = gen_scale(&cfg, i);
            assert_eq!(t.segments().len(), 1);
            assert!(!t.segments()[0].is_point());
        }
    }

    #[test]
    fn yin_qi_construction_on_interval() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let f = cumulative(&t, 0.0, |a, b| 0.5 * (b - a));
        let f = f.build().unwrap();
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert!((f.eval(x).unwrap() - x / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn akkouchi_construction_on_lattice() {
        let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
        let mut rng = GenConfig::default().rng(0, 9);
        let spec = cumulative(&t, 1.0, |a, b| {
            let _ = rng.gen::<u8>();
            let h = b - a;
            let sd = (t.sigma(b).unwrap() - b) / h;
            h * (1.0 + sd)
        });
        let f = spec.build().unwrap();
        let vals: Vec<f64> = (0..4).map(|i| f.eval(i as f64).unwrap()).collect();
        assert_eq!(vals, vec![1.0, 3.0, 5.0, 6.0]);
    }

    #[test]
    fn generated_instances_pass_their_gate() {
        let cfg = GenConfig::with_seed(11);
        for theorem in TheoremId::ALL {
            for i in 0..15 {
                let t = gen_scale(&cfg, i);
                let inst = gen_admissible(theorem, &t, &cfg, i).unwrap();
                let v = inst.replay().unwrap();
                assert!(
                    v.applicable,
                    "{theorem} #{i}: {:?}",
                    v.hypotheses.iter().filter(|h| !h.satisfied).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn inadmissible_instances_are_gated() {
        let cfg = GenConfig::with_seed(5);
        for theorem in TheoremId::ALL {
            for i in 0..10 {
                let t = gen_scale(&cfg, i);
                let inst = gen_inadmissible(theorem, &t, &cfg, i).unwrap();
                let v = inst.replay().unwrap();
                assert_eq!(v.outcome, Outcome::NotApplicable, "{theorem} #{i}");
            }
        }
    }
}
