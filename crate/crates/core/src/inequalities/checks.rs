use crate::error::{Error, Result};
use crate::function::ScaleFunction;
use crate::scale::TimeScale;

use super::domain::{positive_power, Domain, Minimum};
use super::{
    compare, AuxInequality, BoundsPair, CheckConfig, EqualityReport, ExponentPair, HypothesisReport, InequalityVerdict,
    Outcome, TheoremId,
};

/// Relative spread of `f/g` below which the pair counts as proportional.
const PROPORTIONAL_SPREAD: f64 = 1e-6;

/// Everything a check needs besides the scale, interval and tolerances.
#[derive(Debug, Clone)]
pub struct Instance {
    pub theorem: TheoremId,
    pub f: ScaleFunction,
    pub g: Option<ScaleFunction>,
    pub p: f64,
    /// Conjugate exponent; derived from `p` when absent.
    pub q: Option<f64>,
    pub bounds: Option<BoundsPair>,
}

impl Instance {
    pub fn new(theorem: TheoremId, f: ScaleFunction, p: f64) -> Self {
        Self { theorem, f, g: None, p, q: None, bounds: None }
    }

    pub fn with_g(mut self, g: ScaleFunction) -> Self {
        self.g = Some(g);
        self
    }

    pub fn with_bounds(mut self, bounds: Option<BoundsPair>) -> Self {
        self.bounds = bounds;
        self
    }

    fn exponents(&self) -> Result<ExponentPair> {
        match self.q {
            Some(q) => ExponentPair::new(self.p, q),
            None => ExponentPair::conjugate(self.p),
        }
    }

    fn g(&self) -> Result<&ScaleFunction> {
        self.g.as_ref().ok_or_else(|| Error::BadExponents(format!("{} needs a second function g", self.theorem)))
    }
}

/// Run the check named by `inst.theorem`.
pub fn check(scale: &TimeScale, a: f64, b: f64, cfg: &CheckConfig, inst: &Instance) -> Result<InequalityVerdict> {
    let f = &inst.f;
    match inst.theorem {
        TheoremId::Holder => check_holder(scale, a, b, cfg, f, inst.g()?, inst.exponents()?),
        TheoremId::RatioHolder => check_ratio_holder(scale, a, b, cfg, f, inst.g()?, inst.exponents()?),
        TheoremId::BoundedRatio => check_bounded_ratio(scale, a, b, cfg, f, inst.g()?, inst.exponents()?, inst.bounds),
        TheoremId::PowerBounded => check_power_bounded(scale, a, b, cfg, f, inst.g()?, inst.exponents()?, inst.bounds),
        TheoremId::Qi => check_qi(scale, a, b, cfg, f, inst.p),
        TheoremId::Akkouchi => check_akkouchi_ts(scale, a, b, cfg, f, inst.p),
        TheoremId::PmBound => check_pm_bound(scale, a, b, cfg, f, inst.exponents()?, inst.bounds),
        TheoremId::YinQi => check_yin_qi_strict(scale, a, b, cfg, f, inst.p),
    }
}

struct Draft<'d> {
    theorem: TheoremId,
    dom: &'d Domain,
    hypotheses: Vec<HypothesisReport>,
    f: &'d ScaleFunction,
    g: Option<&'d ScaleFunction>,
    p: f64,
    q: Option<f64>,
    bounds: Option<BoundsPair>,
    bounds_estimated: bool,
}

impl<'d> Draft<'d> {
    fn new(theorem: TheoremId, dom: &'d Domain, f: &'d ScaleFunction, p: f64) -> Self {
        Self { theorem, dom, hypotheses: Vec::new(), f, g: None, p, q: None, bounds: None, bounds_estimated: false }
    }

    fn applicable(&self) -> bool {
        self.hypotheses.iter().all(|h| h.satisfied)
    }

    /// Assemble the verdict. Failures computing the two sides are errors
    /// only when the hypotheses hold.
    fn finish(self, sides: Result<(f64, f64)>) -> Result<InequalityVerdict> {
        let applicable = self.applicable();
        let (lhs, rhs) = match sides {
            Ok(s) => s,
            Err(e) if applicable => return Err(e),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let strict = self.theorem.strict();
        let tol = self.dom.cfg.tol;
        let numeric = compare(lhs, rhs, tol, strict);
        let outcome = match (applicable, numeric) {
            (false, _) => Outcome::NotApplicable,
            (true, true) => Outcome::Holds,
            (true, false) => Outcome::Violated,
        };
        Ok(InequalityVerdict {
            theorem: self.theorem,
            outcome,
            hypotheses: self.hypotheses,
            lhs,
            rhs,
            slack: lhs - rhs,
            holds: applicable.then_some(numeric),
            applicable,
            strict_required: strict,
            tol,
            a: self.dom.a,
            b: self.dom.b,
            scale_digest: self.dom.digest.clone(),
            function_text: self.f.label(),
            g_text: self.g.map(ScaleFunction::label),
            p: self.p,
            q: self.q,
            m: self.bounds.map(|b| b.m),
            big_m: self.bounds.map(|b| b.big_m),
            bounds_estimated: self.bounds_estimated,
            aux: Vec::new(),
            equality: None,
            hypothesis_samples: self.dom.samples.len(),
        })
    }
}

fn regime_report(pq: &ExponentPair, allow_negative: bool) -> HypothesisReport {
    if allow_negative {
        let margin = if pq.p > 1.0 {
            pq.p - 1.0
        } else if pq.p < 0.0 {
            -pq.p
        } else {
            -pq.p.min(1.0 - pq.p)
        };
        HypothesisReport::new("p > 1 or p < 0", margin, None, 0.0, true)
    } else {
        HypothesisReport::new("p > 1", pq.p - 1.0, None, 0.0, true)
    }
}

fn pow_of(f: &ScaleFunction, label: &str, e: f64) -> ScaleFunction {
    f.map(label, move |v| positive_power(v, e))
}

/// `[∫|f|^p]^{1/p} [∫|g|^q]^{1/q} ≥ ∫|fg|`.
pub fn check_holder(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    g: &ScaleFunction,
    pq: ExponentPair,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::Holder, &dom, f, pq.p);
    d.g = Some(g);
    d.q = Some(pq.q);
    d.hypotheses.push(regime_report(&pq, false));
    d.hypotheses.push(dom.defined(f, "f defined on [a,b]"));
    d.hypotheses.push(dom.defined(g, "g defined on [a,b]"));
    let (p, q) = (pq.p, pq.q);
    let sides = (|| {
        let fp = dom.integral(&f.map("abs_pow", move |v| Ok(v.abs().powf(p))))?;
        let gq = dom.integral(&g.map("abs_pow", move |v| Ok(v.abs().powf(q))))?;
        let fg = dom.integral(&f.zip_with(g, "abs_mul", |u, v| Ok((u * v).abs())))?;
        Ok((fp.powf(1.0 / p) * gq.powf(1.0 / q), fg))
    })();
    d.finish(sides)
}

/// `∫ f^p / g^{p/q} ≥ [∫f]^p / [∫g]^{p/q}` for `p > 1` or `p < 0`, with
/// equality exactly when `f` is a constant multiple of `g`.
pub fn check_ratio_holder(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    g: &ScaleFunction,
    pq: ExponentPair,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::RatioHolder, &dom, f, pq.p);
    d.g = Some(g);
    d.q = Some(pq.q);
    d.hypotheses.push(regime_report(&pq, true));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    d.hypotheses.push(dom.positive(g, "g > 0 on [a,b]"));
    let (p, r) = (pq.p, pq.p / pq.q);
    let sides = (|| {
        let integrand = f.zip_with(g, "ratio_pow", move |u, v| Ok(positive_power(u, p)? / positive_power(v, r)?));
        let lhs = dom.integral(&integrand)?;
        let (fi, gi) = (dom.integral(f)?, dom.integral(g)?);
        Ok((lhs, positive_power(fi, p)? / positive_power(gi, r)?))
    })();
    let applicable = d.applicable();
    let mut v = d.finish(sides)?;
    if applicable {
        let ratios: Vec<f64> = dom.closed().filter_map(|t| Some(f.eval(t).ok()? / g.eval(t).ok()?)).collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| (l.min(r), h.max(r)));
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = (hi - lo) / mean.abs();
        v.equality = Some(EqualityReport {
            near_equality: v.slack.abs() <= v.scaled_tol(),
            proportional: spread <= PROPORTIONAL_SPREAD,
            ratio_spread: spread,
        });
    }
    Ok(v)
}

/// `(M/m)^{1/(pq)} ∫ f^{1/p} g^{1/q} ≥ [∫f]^{1/p} [∫g]^{1/q}` when
/// `m ≤ f/g ≤ M`.
#[allow(clippy::too_many_arguments)]
pub fn check_bounded_ratio(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    g: &ScaleFunction,
    pq: ExponentPair,
    bounds: Option<BoundsPair>,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::BoundedRatio, &dom, f, pq.p);
    d.g = Some(g);
    d.q = Some(pq.q);
    d.hypotheses.push(regime_report(&pq, false));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    d.hypotheses.push(dom.positive(g, "g > 0 on [a,b]"));
    let ratio =
        f.zip_with(g, "ratio", |u, v| if v == 0.0 { Err(Error::EvalDomain("g vanishes".into())) } else { Ok(u / v) });
    let (bp, report, estimated) = dom.bounds(&ratio, bounds, "m <= f/g <= M on [a,b]")?;
    d.hypotheses.push(report);
    d.bounds = bp;
    d.bounds_estimated = estimated;
    let (p, q) = (pq.p, pq.q);
    let sides = (|| {
        let bp = bp.ok_or(Error::BadBounds { m: f64::NAN, big_m: f64::NAN })?;
        let mixed =
            f.zip_with(g, "root_mul", move |u, v| Ok(positive_power(u, 1.0 / p)? * positive_power(v, 1.0 / q)?));
        let lhs = bp.ratio().powf(1.0 / (p * q)) * dom.integral(&mixed)?;
        let rhs = positive_power(dom.integral(f)?, 1.0 / p)? * positive_power(dom.integral(g)?, 1.0 / q)?;
        Ok((lhs, rhs))
    })();
    d.finish(sides)
}

/// `(M/m)^{1/(pq)} ∫ fg ≥ [∫f^p]^{1/p} [∫g^q]^{1/q}` when
/// `m ≤ f^p/g^q ≤ M`.
#[allow(clippy::too_many_arguments)]
pub fn check_power_bounded(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    g: &ScaleFunction,
    pq: ExponentPair,
    bounds: Option<BoundsPair>,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::PowerBounded, &dom, f, pq.p);
    d.g = Some(g);
    d.q = Some(pq.q);
    d.hypotheses.push(regime_report(&pq, false));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    d.hypotheses.push(dom.positive(g, "g > 0 on [a,b]"));
    let (p, q) = (pq.p, pq.q);
    let ratio = f.zip_with(g, "power_ratio", move |u, v| Ok(positive_power(u, p)? / positive_power(v, q)?));
    let (bp, report, estimated) = dom.bounds(&ratio, bounds, "m <= f^p/g^q <= M on [a,b]")?;
    d.hypotheses.push(report);
    d.bounds = bp;
    d.bounds_estimated = estimated;
    let sides = (|| {
        let bp = bp.ok_or(Error::BadBounds { m: f64::NAN, big_m: f64::NAN })?;
        let lhs = bp.ratio().powf(1.0 / (p * q)) * dom.integral(&f.mul(g))?;
        let fp = dom.integral(&pow_of(f, "pow", p))?;
        let gq = dom.integral(&pow_of(g, "pow", q))?;
        Ok((lhs, fp.powf(1.0 / p) * gq.powf(1.0 / q)))
    })();
    d.finish(sides)
}

/// `∫ f^p ≥ [∫f]^{p-1}` when `∫f ≥ (b-a)^{p-1}`, for `p > 1` or `p < 0`.
pub fn check_qi(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    p: f64,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::Qi, &dom, f, p);
    d.q = (p != 1.0).then(|| p / (p - 1.0));
    let regime = ExponentPair { p, q: d.q.unwrap_or(f64::INFINITY) };
    d.hypotheses.push(regime_report(&regime, true));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    let integral = dom.integral(f);
    let threshold = dom.len().powf(p - 1.0);
    d.hypotheses.push(match &integral {
        Ok(i) => {
            HypothesisReport::new("integral of f >= (b-a)^(p-1)", i - threshold, None, dom.check_tol(threshold), false)
        }
        Err(_) => HypothesisReport::new("integral of f >= (b-a)^(p-1)", f64::NEG_INFINITY, None, 0.0, false),
    });
    let sides = (|| {
        let fi = integral?;
        Ok((dom.integral(&pow_of(f, "pow", p))?, positive_power(fi, p - 1.0)?))
    })();
    d.finish(sides)
}

/// `∫ f^{p+2} ≥ [∫f]^{p+1} / (b-a)^{p-1}` for `p ≥ 1` when `f(a) ≥ μ(a)` and
/// `f^Δ ≥ 1 + σ^Δ` on `(a, b)`.
pub fn check_akkouchi_ts(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    p: f64,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::Akkouchi, &dom, f, p);
    d.hypotheses.push(HypothesisReport::new("p >= 1", p - 1.0, None, 0.0, false));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    let s = dom.scale.clone();
    let sigma = ScaleFunction::from_fn("sigma", move |x| s.sigma(x));
    d.hypotheses.push(dom.positive(&sigma, "sigma > 0 on [a,b]"));
    let mu_a = dom.scale.mu(a)?;
    let fa_margin = f.eval(a).map_or(f64::NEG_INFINITY, |fa| fa - mu_a);
    d.hypotheses.push(HypothesisReport::new("f(a) >= mu(a)", fa_margin, Some(a), dom.check_tol(mu_a), false));

    let open: Vec<f64> = dom.open().collect();
    let mut sigma_fail = None;
    let mut f_fail = None;
    let mut pairs = Vec::with_capacity(open.len());
    for &t in &open {
        let sd = dom.sigma_delta(t);
        let fd = dom.delta(f, t);
        if sd.is_err() && sigma_fail.is_none() {
            sigma_fail = Some(t);
        }
        if fd.is_err() && f_fail.is_none() {
            f_fail = Some(t);
        }
        if let (Ok(sd), Ok(fd)) = (sd, fd) {
            pairs.push((t, fd, sd));
        }
    }
    let flag = |name: &str, at: Option<f64>| {
        HypothesisReport::new(name, if at.is_some() { f64::NEG_INFINITY } else { 0.0 }, at, 0.0, false)
    };
    d.hypotheses.push(flag("sigma delta-differentiable on (a,b)", sigma_fail));
    d.hypotheses.push(flag("f delta-differentiable on (a,b)", f_fail));
    let (mut margin, mut at) = (if pairs.is_empty() { 0.0 } else { f64::INFINITY }, None);
    let mut size = 1.0f64;
    for &(t, fd, sd) in &pairs {
        size = size.max(fd.abs());
        if fd - 1.0 - sd < margin {
            margin = fd - 1.0 - sd;
            at = Some(t);
        }
    }
    let slope_report =
        HypothesisReport::new("f^delta >= 1 + sigma^delta on (a,b)", margin, at, dom.check_tol(size), false);
    d.hypotheses.push(slope_report);

    let sides = (|| {
        let lhs = dom.integral(&pow_of(f, "pow", p + 2.0))?;
        let fi = dom.integral(f)?;
        Ok((lhs, positive_power(fi, p + 1.0)? / dom.len().powf(p - 1.0)))
    })();
    d.finish(sides)
}

/// `(b-a)^{-(p+1)/q} (M/m)^{2/(pq)} [∫f^{1/p}]^p ≥ [∫f^p]^{1/p}` when
/// `m ≤ f^p ≤ M`. The two intermediate bounds chained in its proof are
/// reported as auxiliary inequalities.
pub fn check_pm_bound(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    pq: ExponentPair,
    bounds: Option<BoundsPair>,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::PmBound, &dom, f, pq.p);
    d.q = Some(pq.q);
    d.hypotheses.push(regime_report(&pq, false));
    d.hypotheses.push(dom.positive(f, "f > 0 on [a,b]"));
    let (p, q) = (pq.p, pq.q);
    let fp = pow_of(f, "pow", p);
    let (bp, report, estimated) = dom.bounds(&fp, bounds, "m <= f^p <= M on [a,b]")?;
    d.hypotheses.push(report);
    d.bounds = bp;
    d.bounds_estimated = estimated;
    let len = dom.len();
    let parts = (|| {
        let bp = bp.ok_or(Error::BadBounds { m: f64::NAN, big_m: f64::NAN })?;
        let k = bp.ratio().powf(1.0 / (p * q));
        let root = dom.integral(&pow_of(f, "pow", 1.0 / p))?.powf(p);
        let norm = dom.integral(&fp)?.powf(1.0 / p);
        let fi = dom.integral(f)?;
        Ok((k, root, norm, fi))
    })();
    let applicable = d.applicable();
    let (sides, parts) = match parts {
        Ok((k, root, norm, fi)) => (Ok((len.powf(-(p + 1.0) / q) * k * k * root, norm)), Some((k, root, norm, fi))),
        Err(e) => (Err(e), None),
    };
    let mut v = d.finish(sides)?;
    if applicable {
        if let Some((k, root, norm, fi)) = parts {
            let tol = cfg.tol;
            let aux = |name: &str, lhs: f64, rhs: f64| AuxInequality {
                name: name.into(),
                lhs,
                rhs,
                slack: lhs - rhs,
                holds: compare(lhs, rhs, tol, false),
            };
            v.aux.push(aux("(M/m)^(1/pq) (b-a)^(-1/q) int f >= (int f^p)^(1/p)", k * len.powf(-1.0 / q) * fi, norm));
            v.aux.push(aux("(M/m)^(1/pq) (b-a)^(-p/q) (int f^(1/p))^p >= int f", k * len.powf(-p / q) * root, fi));
        }
    }
    Ok(v)
}

/// `[∫f]^p > 2^{1-p} p ∫ f^{2p-1}` for `p > 1` when `f(a) = 0` and
/// `0 < f^Δ < 1` on `(a, b)`.
pub fn check_yin_qi_strict(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
    p: f64,
) -> Result<InequalityVerdict> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let mut d = Draft::new(TheoremId::YinQi, &dom, f, p);
    d.hypotheses.push(HypothesisReport::new("p > 1", p - 1.0, None, 0.0, true));
    let size = dom.sup_abs(f);
    let fa = f.eval(a).map_or(f64::NEG_INFINITY, |v| -v.abs());
    d.hypotheses.push(HypothesisReport::new("f(a) = 0", fa, Some(a), dom.check_tol(size), false));
    let mut f_fail = None;
    let mut slopes = Vec::new();
    for t in dom.open() {
        match dom.delta(f, t) {
            Ok(v) => slopes.push((t, v)),
            Err(_) => {
                f_fail = f_fail.or(Some(t));
            }
        }
    }
    d.hypotheses.push(HypothesisReport::new(
        "f delta-differentiable on (a,b)",
        if f_fail.is_some() { f64::NEG_INFINITY } else { 0.0 },
        f_fail,
        0.0,
        false,
    ));
    let (mut margin, mut at) = (f64::INFINITY, None);
    for &(t, v) in &slopes {
        let m = v.min(1.0 - v);
        if m < margin {
            margin = m;
            at = Some(t);
        }
    }
    d.hypotheses.push(HypothesisReport::new("0 < f^delta < 1 on (a,b)", margin, at, dom.check_tol(1.0), true));
    // f^(2p-1) is real only for f >= 0.
    let tol_f = dom.check_tol(size);
    let nonneg = Minimum::over(dom.closed(), |t| f.eval(t));
    d.hypotheses.push(nonneg.report("f >= 0 on [a,b]", tol_f, false));

    let clamp = move |v: f64| if v < 0.0 && v >= -tol_f { 0.0 } else { v };
    let sides = (|| {
        let fi = dom.integral(f)?;
        let lhs = positive_power(clamp(fi), p)?;
        let rhs =
            2f64.powf(1.0 - p) * p * dom.integral(&f.map("pow", move |v| positive_power(clamp(v), 2.0 * p - 1.0)))?;
        Ok((lhs, rhs))
    })();
    d.finish(sides)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> ScaleFunction {
        ScaleFunction::parse(s).unwrap()
    }

    fn lattice(n: f64) -> TimeScale {
        TimeScale::lattice(0.0, n, 1.0).unwrap()
    }

    fn pair(p: f64) -> ExponentPair {
        ExponentPair::conjugate(p).unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn holder_on_lattice() {
        let v = check_holder(&lattice(3.0), 0.0, 3.0, &cfg(), &f("x+1"), &f("1"), pair(2.0)).unwrap();
        assert!((v.lhs - 42f64.sqrt()).abs() < 1e-12);
        assert!((v.rhs - 6.0).abs() < 1e-12);
        assert_eq!(v.outcome, Outcome::Holds);
        assert_eq!(v.q, Some(2.0));
    }

    #[test]
    fn holder_equality_on_interval() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let v = check_holder(&t, 0.0, 1.0, &cfg(), &f("1"), &f("1"), pair(2.0)).unwrap();
        assert!((v.lhs - 1.0).abs() < 1e-12 && (v.rhs - 1.0).abs() < 1e-12);
        assert_eq!(v.holds, Some(true));
    }

    #[test]
    fn ratio_holder_lattice_and_equality() {
        let v = check_ratio_holder(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(2.0)).unwrap();
        assert!((v.lhs - 5.0).abs() < 1e-12 && (v.rhs - 4.5).abs() < 1e-12);
        assert!(!v.equality.unwrap().near_equality);

        let t = TimeScale::interval(0.0, 2.0).unwrap();
        let v = check_ratio_holder(&t, 0.0, 2.0, &cfg(), &f("3*(x^2+1)"), &f("x^2+1"), pair(-1.5)).unwrap();
        let eq = v.equality.unwrap();
        assert!(eq.near_equality && eq.proportional, "{v:?}");
    }

    #[test]
    fn ratio_holder_gates_bad_exponent_and_sign() {
        let t = lattice(2.0);
        let v = check_ratio_holder(&t, 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(0.5)).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
        let v = check_ratio_holder(&t, 0.0, 2.0, &cfg(), &f("x-1"), &f("1"), pair(2.0)).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
        assert_eq!(v.holds, None);
    }

    #[test]
    fn bounded_ratio_lattice() {
        let b = Some(BoundsPair::new(1.0, 2.0).unwrap());
        let v = check_bounded_ratio(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(2.0), b).unwrap();
        let want_lhs = 2f64.powf(0.25) * (1.0 + 2f64.sqrt());
        assert!((v.lhs - want_lhs).abs() < 1e-12);
        assert!((v.rhs - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(v.outcome, Outcome::NotApplicable, "f(2)/g(2) = 3 lies above M = 2");
        let v = check_bounded_ratio(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(2.0), None).unwrap();
        assert!(v.bounds_estimated && v.applicable);
        assert!((v.m.unwrap() - 1.0).abs() < 1e-8 && (v.big_m.unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn power_bounded_lattice() {
        let b = Some(BoundsPair::new(1.0, 4.0).unwrap());
        let v = check_power_bounded(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(2.0), b).unwrap();
        assert!((v.lhs - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((v.rhs - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(v.outcome, Outcome::NotApplicable, "f^p(2) = 9 lies above M = 4");
        let b = Some(BoundsPair::new(1.0, 9.0).unwrap());
        let v = check_power_bounded(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), &f("1"), pair(2.0), b).unwrap();
        assert!((v.lhs - 3.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn qi_worked_instance() {
        let v = check_qi(&lattice(3.0), 0.0, 3.0, &cfg(), &f("2*x+1"), 2.0).unwrap();
        assert_eq!((v.lhs, v.rhs), (35.0, 9.0));
        assert_eq!(v.hypotheses[2].margin, 6.0);
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn qi_equality_on_unit_interval() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let v = check_qi(&t, 0.0, 1.0, &cfg(), &f("1"), 2.0).unwrap();
        assert!(v.hypotheses[2].margin.abs() < 1e-12 && v.hypotheses[2].satisfied);
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn akkouchi_worked_instance() {
        let v = check_akkouchi_ts(&lattice(3.0), 0.0, 3.0, &cfg(), &f("2*x+1"), 1.0).unwrap();
        assert_eq!((v.lhs, v.rhs), (153.0, 81.0));
        assert!(v.hypotheses.iter().all(|h| h.margin >= 0.0), "{:?}", v.hypotheses);
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn akkouchi_gate_on_small_start() {
        let v = check_akkouchi_ts(&lattice(3.0), 0.0, 3.0, &cfg(), &f("2*x+0.5"), 1.0).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
        let h = v.hypotheses.iter().find(|h| h.name == "f(a) >= mu(a)").unwrap();
        assert!(!h.satisfied && (h.margin + 0.5).abs() < 1e-15);
    }

    #[test]
    fn pm_bound_equality_and_lattice() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let b = Some(BoundsPair::new(1.0, 1.0).unwrap());
        let v = check_pm_bound(&t, 0.0, 1.0, &cfg(), &f("1"), pair(3.0), b).unwrap();
        assert!((v.lhs - 1.0).abs() < 1e-12 && (v.rhs - 1.0).abs() < 1e-12);
        assert_eq!(v.aux.len(), 2);

        let b = Some(BoundsPair::new(1.0, 4.0).unwrap());
        let v = check_pm_bound(&lattice(2.0), 0.0, 2.0, &cfg(), &f("x+1"), pair(2.0), b).unwrap();
        let want = 2f64.powf(-1.5) * 2.0 * (1.0 + 2f64.sqrt()).powi(2);
        assert!((v.lhs - want).abs() < 1e-12);
        assert!((v.rhs - 5f64.sqrt()).abs() < 1e-12);
        assert!(v.aux.iter().all(|x| x.holds));
    }

    #[test]
    fn yin_qi_dense_instance() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let v = check_yin_qi_strict(&t, 0.0, 1.0, &cfg(), &f("x/2"), 2.0).unwrap();
        assert!((v.lhs - 1.0 / 16.0).abs() < 1e-10);
        assert!((v.rhs - 1.0 / 32.0).abs() < 1e-10);
        assert!(v.strict_required);
        assert_eq!(v.outcome, Outcome::Holds);
    }

    #[test]
    fn yin_qi_gate_on_unit_slope() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let v = check_yin_qi_strict(&t, 0.0, 1.0, &cfg(), &f("x"), 2.0).unwrap();
        assert_eq!(v.outcome, Outcome::NotApplicable);
    }

    #[test]
    fn verdict_json_shape() {
        let v = check_qi(&lattice(3.0), 0.0, 3.0, &cfg(), &f("2*x+1"), 2.0).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        for key in [
            "theorem",
            "hypotheses",
            "lhs",
            "rhs",
            "slack",
            "holds",
            "applicable",
            "tol",
            "scale_digest",
            "function_text",
            "p",
            "q",
            "m",
            "M",
        ] {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(j["theorem"], "qi");
        assert!(j["hypotheses"][0].get("witness_point").is_some());
    }
}
