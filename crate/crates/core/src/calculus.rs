//! Delta differentiation and Cauchy delta integration on a [`TimeScale`],
//! plus residual checks for the structural identities (fundamental theorem,
//! integration by parts, product/quotient rules, chain rule, substitution).
//!
//! At right-scattered points the delta derivative is the exact forward
//! quotient `(f(σ(t)) - f(t)) / μ(t)`. At right-dense points it is a one-sided
//! limit taken inside the containing segment, estimated by Richardson
//! extrapolation of difference quotients.
//!
//! The integral over `[a, b]` adds `μ(t) f(t)` for every right-scattered
//! `t ∈ [a, b)` to adaptive Simpson integrals over the dense segments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::ScaleFunction;
use crate::quadrature::adaptive_simpson;
use crate::scale::{Segment, TimeScale};

pub use crate::quadrature::DEFAULT_TOL;

const RICHARDSON_LEVELS: usize = 4;
const STEP_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    ExactScattered,
    NumericDense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaResult {
    pub value: f64,
    pub method: DeltaMethod,
    pub err_estimate: f64,
}

impl DeltaResult {
    fn exact(value: f64) -> Self {
        Self { value, method: DeltaMethod::ExactScattered, err_estimate: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub discrete_part: f64,
    pub continuous_part: f64,
    /// Quadrature error bound for the continuous part only.
    pub err_estimate: f64,
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Sum {
    total: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, v: f64) {
        let t = self.total + v;
        if self.total.abs() >= v.abs() {
            self.comp += (self.total - t) + v;
        } else {
            self.comp += (v - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.comp
    }
}

/// Where a derivative at a right-dense point may look.
#[derive(Debug, Clone, Copy)]
enum Side {
    Forward(f64),
    Backward(f64),
}

/// Richardson tableau over steps `h0, h0/2, h0/4, h0/8` for a quotient with
/// an error expansion in integer powers of `h`. Returns the extrapolated value
/// and the last correction.
fn richardson(mut quotient: impl FnMut(f64) -> Result<f64>, h0: f64) -> Result<(f64, f64)> {
    let mut table = [[0.0f64; RICHARDSON_LEVELS]; RICHARDSON_LEVELS];
    let mut h = h0;
    for i in 0..RICHARDSON_LEVELS {
        table[i][0] = quotient(h)?;
        for j in 1..=i {
            let factor = (1u32 << j) as f64 - 1.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / factor;
        }
        h *= 0.5;
    }
    let n = RICHARDSON_LEVELS - 1;
    Ok((table[n][n], (table[n][n] - table[n][n - 1]).abs()))
}

fn check_convergence(value: f64, residual: f64, noise: f64, tol: f64) -> Result<DeltaResult> {
    if !value.is_finite() {
        return Err(Error::EvalDomain("difference quotient is not finite".into()));
    }
    if residual > tol * (1.0 + value.abs()) && residual > noise {
        return Err(Error::NoConvergence { what: "delta derivative extrapolation", residual });
    }
    Ok(DeltaResult { value, method: DeltaMethod::NumericDense, err_estimate: residual })
}

fn first_derivative_on(f: &ScaleFunction, t: f64, side: Side, tol: f64) -> Result<DeltaResult> {
    let (dir, reach) = match side {
        Side::Forward(r) => (1.0, r),
        Side::Backward(r) => (-1.0, r),
    };
    if let Some(known) = f.known_dense_delta(t, dir < 0.0) {
        return Ok(DeltaResult { value: known?, method: DeltaMethod::NumericDense, err_estimate: 0.0 });
    }
    let ft = f.eval(t)?;
    with_shrinking_steps((0.5 * reach).min(1e-3 * (1.0 + t.abs())), |h0| {
        let mut fmax = ft.abs();
        let (value, residual) = richardson(
            |h| {
                let fs = f.eval(t + dir * h)?;
                fmax = fmax.max(fs.abs());
                Ok(dir * (fs - ft) / h)
            },
            h0,
        )?;
        let h_min = h0 / (1u32 << (RICHARDSON_LEVELS - 1)) as f64;
        let noise = 64.0 * f64::EPSILON * fmax.max(f64::MIN_POSITIVE) / h_min;
        check_convergence(value, residual, noise, tol)
    })
}

/// Run `attempt` from `h0`, retrying with starting steps `h0/8` and `h0/64`
/// while it fails to converge. Truncation error falls by `8^4` per retry
/// while round-off grows only by 8.
fn with_shrinking_steps(h0: f64, mut attempt: impl FnMut(f64) -> Result<DeltaResult>) -> Result<DeltaResult> {
    let mut h = h0;
    let mut last = None;
    for _ in 0..STEP_RETRIES {
        match attempt(h) {
            Err(e @ Error::NoConvergence { .. }) => last = Some(e),
            other => return other,
        }
        h /= 8.0;
    }
    Err(last.expect("at least one attempt"))
}

fn second_derivative_on(f: &ScaleFunction, t: f64, side: Side, tol: f64) -> Result<DeltaResult> {
    let (dir, reach) = match side {
        Side::Forward(r) => (1.0, r),
        Side::Backward(r) => (-1.0, r),
    };
    if f.as_table().is_some() {
        // piecewise linear: the one-sided slope is locally constant
        return Ok(DeltaResult { value: 0.0, method: DeltaMethod::NumericDense, err_estimate: 0.0 });
    }
    if f.known_dense_delta(t, dir < 0.0).is_some() {
        let g = f.clone();
        let delta = ScaleFunction::from_fn("delta", move |s| {
            g.known_dense_delta(s, dir < 0.0).unwrap_or(Err(Error::TabulationGap { t: s }))
        });
        return first_derivative_on(&delta, t, side, tol);
    }
    let ft = f.eval(t)?;
    with_shrinking_steps((0.25 * reach).min(1e-2 * (1.0 + t.abs())), |h0| {
        let mut fmax = ft.abs();
        let (value, residual) = richardson(
            |h| {
                let f1 = f.eval(t + dir * h)?;
                let f2 = f.eval(t + dir * 2.0 * h)?;
                fmax = fmax.max(f1.abs()).max(f2.abs());
                Ok((f2 - 2.0 * f1 + ft) / (h * h))
            },
            h0,
        )?;
        let h_min = h0 / (1u32 << (RICHARDSON_LEVELS - 1)) as f64;
        let noise = 256.0 * f64::EPSILON * fmax.max(f64::MIN_POSITIVE) / (h_min * h_min);
        check_convergence(value, residual, noise, tol)
    })
}

/// Side to differentiate on at a point of a dense segment: the longer one,
/// which is always forward at the left end and backward at the right end.
fn dense_side(seg: Segment, s: f64) -> Side {
    let (fwd, back) = (seg.hi - s, s - seg.lo);
    if fwd >= back {
        Side::Forward(fwd)
    } else {
        Side::Backward(back)
    }
}

/// Derivative of `f` restricted to the dense segment `seg` at `s ∈ seg`.
/// Used as the integrand on dense segments, where single points carry no
/// weight.
pub(crate) fn dense_derivative(f: &ScaleFunction, seg: Segment, s: f64, tol: f64) -> Result<f64> {
    let side = if f.known_dense_delta(s, false).is_some() && s < seg.hi {
        Side::Forward(seg.hi - s)
    } else {
        dense_side(seg, s)
    };
    Ok(first_derivative_on(f, s, side, tol)?.value)
}

/// How the delta derivative at `t` is obtained.
enum Kind {
    Scattered { sigma: f64 },
    Dense(Side),
}

fn kind_at(scale: &TimeScale, t: f64) -> Result<Kind> {
    let seg = scale.segment_of(t)?;
    if t < seg.hi {
        return Ok(Kind::Dense(if t > seg.lo { dense_side(seg, t) } else { Side::Forward(seg.hi - t) }));
    }
    let sigma = scale.sigma(t)?;
    if sigma > t {
        Ok(Kind::Scattered { sigma })
    } else if !seg.is_point() {
        // left-dense maximum: one-sided limit from the left
        Ok(Kind::Dense(Side::Backward(t - seg.lo)))
    } else {
        Err(Error::OutsideKappaDomain { t })
    }
}

/// Bodies that know their own slope report the slope to the right, so use
/// the forward side whenever the segment continues past `t`.
fn prefer_forward(f: &ScaleFunction, scale: &TimeScale, t: f64, side: Side) -> Result<Side> {
    let hi = scale.segment_of(t)?.hi;
    Ok(match side {
        Side::Backward(_) if t < hi && f.known_dense_delta(t, false).is_some() => Side::Forward(hi - t),
        s => s,
    })
}

/// Delta derivative of `f` at `t ∈ T^κ`.
pub fn delta_derivative(f: &ScaleFunction, scale: &TimeScale, t: f64, tol: f64) -> Result<DeltaResult> {
    match kind_at(scale, t)? {
        Kind::Scattered { sigma } => {
            let v = (f.eval(sigma)? - f.eval(t)?) / (sigma - t);
            if !v.is_finite() {
                return Err(Error::EvalDomain(format!("delta quotient is not finite at {t}")));
            }
            Ok(DeltaResult::exact(v))
        }
        Kind::Dense(side) => first_derivative_on(f, t, prefer_forward(f, scale, t, side)?, tol),
    }
}

/// Second delta derivative at `t ∈ T^{κκ}`.
pub fn second_delta_derivative(f: &ScaleFunction, scale: &TimeScale, t: f64, tol: f64) -> Result<DeltaResult> {
    match kind_at(scale, t)? {
        Kind::Scattered { sigma } => {
            let here = delta_derivative(f, scale, t, tol)?;
            let next = delta_derivative(f, scale, sigma, tol)?;
            let mu = sigma - t;
            let method = if next.method == DeltaMethod::ExactScattered {
                DeltaMethod::ExactScattered
            } else {
                DeltaMethod::NumericDense
            };
            Ok(DeltaResult {
                value: (next.value - here.value) / mu,
                method,
                err_estimate: (here.err_estimate + next.err_estimate) / mu,
            })
        }
        Kind::Dense(side) => second_derivative_on(f, t, prefer_forward(f, scale, t, side)?, tol),
    }
}

/// Delta derivative of the forward jump operator.
pub fn sigma_delta(scale: &TimeScale, t: f64, tol: f64) -> Result<DeltaResult> {
    let s = scale.clone();
    let sigma = ScaleFunction::from_fn("sigma", move |x| s.sigma(x));
    delta_derivative(&sigma, scale, t, tol)
}

/// Cauchy integral with separate integrands for scattered points and for
/// dense segments.
pub(crate) fn integrate_parts(
    scale: &TimeScale,
    a: f64,
    b: f64,
    tol: f64,
    mut at_point: impl FnMut(f64) -> Result<f64>,
    mut on_dense: impl FnMut(f64, Segment) -> Result<f64>,
) -> Result<IntegralResult> {
    if !scale.contains(a) {
        return Err(Error::NotInScale { t: a });
    }
    if !scale.contains(b) {
        return Err(Error::NotInScale { t: b });
    }
    if a > b {
        return Err(Error::BadInterval { a, b });
    }
    if a == b {
        return Ok(IntegralResult { value: 0.0, discrete_part: 0.0, continuous_part: 0.0, err_estimate: 0.0 });
    }
    let part = scale.restrict(a, b)?;
    let segs = part.segments();
    let mut discrete = Sum::default();
    let mut continuous = Sum::default();
    let mut err = 0.0;
    for (i, seg) in segs.iter().enumerate() {
        if !seg.is_point() {
            let q = adaptive_simpson(|s| on_dense(s, *seg), seg.lo, seg.hi, tol)?;
            continuous.add(q.value);
            err += q.err_estimate;
        }
        if let Some(next) = segs.get(i + 1) {
            discrete.add((next.lo - seg.hi) * at_point(seg.hi)?);
        }
    }
    let (d, c) = (discrete.value(), continuous.value());
    Ok(IntegralResult { value: d + c, discrete_part: d, continuous_part: c, err_estimate: err })
}

/// `∫_a^b f(t) Δt`.
pub fn delta_integral(f: &ScaleFunction, scale: &TimeScale, a: f64, b: f64, tol: f64) -> Result<IntegralResult> {
    integrate_parts(scale, a, b, tol, |t| f.eval(t), |t, _| f.eval_on_dense(t))
}

/// Chain rule: `(F ∘ g)^Δ(t) = g^Δ(t) ∫_0^1 F'(g(t) + h μ(t) g^Δ(t)) dh`,
/// with `fprime = F'` supplied by the caller.
pub fn chain_rule_derivative(
    fprime: &ScaleFunction,
    g: &ScaleFunction,
    scale: &TimeScale,
    t: f64,
    tol: f64,
) -> Result<DeltaResult> {
    let gd = delta_derivative(g, scale, t, tol)?;
    let mu = scale.mu(t)?;
    let gt = g.eval(t)?;
    let (inner, inner_err) = if mu == 0.0 {
        (fprime.eval(gt)?, 0.0)
    } else {
        let q = adaptive_simpson(|h| fprime.eval(gt + h * mu * gd.value), 0.0, 1.0, tol)?;
        (q.value, q.err_estimate)
    };
    Ok(DeltaResult {
        value: gd.value * inner,
        method: gd.method,
        err_estimate: gd.err_estimate * inner.abs() + gd.value.abs() * inner_err,
    })
}

/// Residual of an identity together with the size of the terms it balances,
/// so callers can judge it against `tol · (1 + magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub residual: f64,
    /// First-order size of the terms: each computed derivative `d` counts as
    /// `1 + |d|` and is multiplied by the size of its cofactors, so the bound
    /// tracks how derivative errors of order `tol` propagate.
    pub magnitude: f64,
}

/// Size of `d · c` for a computed derivative `d` and exact cofactor `c`.
fn dsize(d: f64, c: f64) -> f64 {
    (1.0 + d.abs()) * c.abs()
}

impl IdentityResidual {
    fn of(lhs: f64, rhs: f64, magnitude: f64) -> Self {
        Self { residual: (lhs - rhs).abs(), magnitude }
    }

    pub fn within(&self, bound: f64) -> bool {
        self.residual <= bound * (1.0 + self.magnitude)
    }
}

/// `|(F∘g)^Δ(t) − g^Δ(t) ∫₀¹ F'(g(t) + hμ(t)g^Δ(t)) dh|`, where `fprime`
/// is `F'`.
pub fn chain_rule_check(
    outer: &ScaleFunction,
    fprime: &ScaleFunction,
    g: &ScaleFunction,
    scale: &TimeScale,
    t: f64,
    tol: f64,
) -> Result<IdentityResidual> {
    let lhs = delta_derivative(&outer.compose(g), scale, t, tol)?.value;
    let rhs = chain_rule_derivative(fprime, g, scale, t, tol)?.value;
    let gd = delta_derivative(g, scale, t, tol)?.value;
    let inner = if gd == 0.0 { fprime.eval(g.eval(t)?)? } else { rhs / gd };
    Ok(IdentityResidual::of(lhs, rhs, 1.0 + lhs.abs() + dsize(gd, inner) + dsize(inner, gd)))
}

/// `|(ω∘v)^Δ(t) − ω^Δ̃(v(t)) v^Δ(t)|`, with `ω^Δ̃` taken on the image scale
/// `v(T)`.
pub fn substitution_check(
    v: &ScaleFunction,
    omega: &ScaleFunction,
    scale: &TimeScale,
    t: f64,
    tol: f64,
) -> Result<IdentityResidual> {
    let samples = scale.scale_points_per_segment(64);
    let mut prev: Option<(f64, f64)> = None;
    for &s in &samples {
        let vs = v.eval(s)?;
        if let Some((ps, pv)) = prev {
            if !(vs > pv) {
                return Err(Error::BadSubstitution { t: ps });
            }
        }
        prev = Some((s, vs));
    }
    let image = TimeScale::new(
        scale.segments().iter().map(|s| Segment::new(v.eval(s.lo)?, v.eval(s.hi)?)).collect::<Result<Vec<_>>>()?,
    )?;
    let lhs = delta_derivative(&omega.compose(v), scale, t, tol)?.value;
    let outer = delta_derivative(omega, &image, v.eval(t)?, tol)?.value;
    let inner = delta_derivative(v, scale, t, tol)?.value;
    Ok(IdentityResidual::of(lhs, outer * inner, 1.0 + lhs.abs() + dsize(outer, inner) + dsize(inner, outer)))
}

/// `|∫_b^c f^Δ Δt − (f(c) − f(b))|`.
pub fn fundamental_theorem_check(
    f: &ScaleFunction,
    scale: &TimeScale,
    b: f64,
    c: f64,
    tol: f64,
) -> Result<IdentityResidual> {
    let integral = integrate_parts(
        scale,
        b,
        c,
        tol,
        |t| Ok(delta_derivative(f, scale, t, tol)?.value),
        |s, seg| dense_derivative(f, seg, s, tol),
    )?;
    let (fc, fb) = (f.eval(c)?, f.eval(b)?);
    let len = c - b;
    Ok(IdentityResidual::of(integral.value, fc - fb, len + integral.value.abs() + fc.abs() + fb.abs()))
}

/// `|∫ f g^Δ − [f g]_b^c + ∫ f^Δ g^σ|`.
pub fn parts_check(
    f: &ScaleFunction,
    g: &ScaleFunction,
    scale: &TimeScale,
    b: f64,
    c: f64,
    tol: f64,
) -> Result<IdentityResidual> {
    let first = integrate_parts(
        scale,
        b,
        c,
        tol,
        |t| Ok(f.eval(t)? * delta_derivative(g, scale, t, tol)?.value),
        |s, seg| Ok(f.eval_on_dense(s)? * dense_derivative(g, seg, s, tol)?),
    )?;
    let g_sigma = g.compose_sigma(scale);
    let second = integrate_parts(
        scale,
        b,
        c,
        tol,
        |t| Ok(delta_derivative(f, scale, t, tol)?.value * g_sigma.eval(t)?),
        |s, seg| Ok(dense_derivative(f, seg, s, tol)? * g_sigma.eval_on_dense(s)?),
    )?;
    let boundary = f.eval(c)? * g.eval(c)? - f.eval(b)? * g.eval(b)?;
    Ok(IdentityResidual::of(
        first.value + second.value,
        boundary,
        (c - b) + first.value.abs() + boundary.abs() + second.value.abs(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductQuotientResiduals {
    pub product: IdentityResidual,
    pub quotient: IdentityResidual,
}

/// Residuals of `(fg)^Δ = f^Δ g + f^σ g^Δ` and
/// `(f/g)^Δ = (f^Δ g − f g^Δ) / (g g^σ)` at `t`.
pub fn product_quotient_check(
    f: &ScaleFunction,
    g: &ScaleFunction,
    scale: &TimeScale,
    t: f64,
    tol: f64,
) -> Result<ProductQuotientResiduals> {
    let fd = delta_derivative(f, scale, t, tol)?.value;
    let gd = delta_derivative(g, scale, t, tol)?.value;
    let sigma = scale.sigma(t)?;
    let (ft, gt) = (f.eval(t)?, g.eval(t)?);
    let (fs, gs) = (f.eval(sigma)?, g.eval(sigma)?);
    if gt * gs == 0.0 {
        return Err(Error::QuotientUndefined { t });
    }
    let pd = delta_derivative(&f.mul(g), scale, t, tol)?.value;
    let qd = delta_derivative(&f.div(g), scale, t, tol)?.value;
    let (p1, p2) = (fd * gt, fs * gd);
    let (q1, q2) = (fd * gt / (gt * gs), ft * gd / (gt * gs));
    Ok(ProductQuotientResiduals {
        product: IdentityResidual::of(pd, p1 + p2, 1.0 + pd.abs() + dsize(fd, gt) + dsize(gd, fs)),
        quotient: IdentityResidual::of(qd, q1 - q2, 1.0 + qd.abs() + dsize(fd, 1.0 / gs) + dsize(gd, ft / (gt * gs))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub derivative_ok: bool,
    pub min_derivative: f64,
    pub min_derivative_at: Option<f64>,
    pub values_ok: bool,
    pub min_increment: f64,
    pub min_increment_at: Option<f64>,
    pub samples: usize,
    pub holds: bool,
}

/// Sampled check that `f^Δ ≥ 0` on `[a, b)` and that `f` does not decrease
/// along the samples of `[a, b]`. Both findings are reported.
pub fn verify_nondecreasing(
    f: &ScaleFunction,
    scale: &TimeScale,
    a: f64,
    b: f64,
    grid_step: f64,
    tol: f64,
) -> Result<MonotonicityReport> {
    let samples = scale.restrict(a, b)?.scale_points(grid_step);
    let mut min_derivative = f64::INFINITY;
    let mut min_derivative_at = None;
    let mut values = Vec::with_capacity(samples.len());
    for &t in &samples {
        values.push(f.eval(t)?);
        if t < b {
            let d = delta_derivative(f, scale, t, tol)?.value;
            if d < min_derivative {
                min_derivative = d;
                min_derivative_at = Some(t);
            }
        }
    }
    let mut min_increment = f64::INFINITY;
    let mut min_increment_at = None;
    let mut values_ok = true;
    for (i, w) in values.windows(2).enumerate() {
        let inc = w[1] - w[0];
        if inc < min_increment {
            min_increment = inc;
            min_increment_at = Some(samples[i]);
        }
        if inc < -tol * (1.0 + w[0].abs().max(w[1].abs())) {
            values_ok = false;
        }
    }
    let derivative_ok = min_derivative >= -tol * (1.0 + min_derivative.abs());
    Ok(MonotonicityReport {
        derivative_ok,
        min_derivative,
        min_derivative_at,
        values_ok,
        min_increment,
        min_increment_at,
        samples: samples.len(),
        holds: derivative_ok && values_ok,
    })
}
