//! Shared plumbing for the checks: the restricted scale, hypothesis samples,
//! integrals and sampled minima.

use crate::calculus::{delta_derivative, delta_integral, sigma_delta};
use crate::error::{Error, Result};
use crate::function::ScaleFunction;
use crate::scale::TimeScale;

use super::{BoundsPair, CheckConfig, HypothesisReport, BOUNDS_WIDENING, DEFAULT_SAMPLES_PER_SEGMENT};

pub(crate) struct Domain {
    /// `T ∩ [a, b]`.
    pub scale: TimeScale,
    pub digest: String,
    pub a: f64,
    pub b: f64,
    pub cfg: CheckConfig,
    /// Samples of `[a, b]`, sorted.
    pub samples: Vec<f64>,
}

/// Smallest sampled value of a pointwise quantity, with where it occurred.
/// An evaluation failure counts as `-∞` at that point.
pub(crate) struct Minimum {
    pub value: f64,
    pub at: Option<f64>,
    pub failed: bool,
}

impl Minimum {
    pub fn over(points: impl IntoIterator<Item = f64>, mut h: impl FnMut(f64) -> Result<f64>) -> Self {
        let mut out = Minimum { value: f64::INFINITY, at: None, failed: false };
        for t in points {
            match h(t) {
                Ok(v) if v.is_nan() => {
                    return Minimum { value: f64::NEG_INFINITY, at: Some(t), failed: true };
                }
                Ok(v) if v < out.value => {
                    out.value = v;
                    out.at = Some(t);
                }
                Ok(_) => {}
                Err(_) => return Minimum { value: f64::NEG_INFINITY, at: Some(t), failed: true },
            }
        }
        out
    }

    pub fn report(&self, name: &str, check_tol: f64, strict: bool) -> HypothesisReport {
        HypothesisReport::new(name, self.value, self.at, check_tol, strict)
    }
}

impl Domain {
    pub fn new(scale: &TimeScale, a: f64, b: f64, cfg: &CheckConfig) -> Result<Self> {
        let restricted = scale.restrict(a, b)?;
        let samples = match cfg.grid_step {
            Some(h) if h > 0.0 => restricted.scale_points(h),
            _ => restricted.scale_points_per_segment(DEFAULT_SAMPLES_PER_SEGMENT),
        };
        Ok(Self { digest: scale.digest(), scale: restricted, a, b, cfg: *cfg, samples })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// Samples strictly between `a` and `b`.
    pub fn open(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().copied().filter(|&t| t > self.a && t < self.b)
    }

    pub fn closed(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().copied()
    }

    pub fn integral(&self, f: &ScaleFunction) -> Result<f64> {
        Ok(delta_integral(f, &self.scale, self.a, self.b, self.cfg.quad_tol)?.value)
    }

    pub fn delta(&self, f: &ScaleFunction, t: f64) -> Result<f64> {
        Ok(delta_derivative(f, &self.scale, t, self.cfg.quad_tol)?.value)
    }

    pub fn sigma_delta(&self, t: f64) -> Result<f64> {
        Ok(sigma_delta(&self.scale, t, self.cfg.quad_tol)?.value)
    }

    /// Absolute tolerance for a hypothesis on quantities of size `magnitude`.
    pub fn check_tol(&self, magnitude: f64) -> f64 {
        let m = if magnitude.is_finite() { magnitude.abs() } else { 0.0 };
        self.cfg.tol * (1.0 + m)
    }

    /// Largest `|f|` over the samples, ignoring evaluation failures.
    pub fn sup_abs(&self, f: &ScaleFunction) -> f64 {
        self.closed().filter_map(|t| f.eval(t).ok()).filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `f > 0` at every sample of `[a, b]`.
    pub fn positive(&self, f: &ScaleFunction, name: &str) -> HypothesisReport {
        let tol = self.check_tol(self.sup_abs(f));
        Minimum::over(self.closed(), |t| f.eval(t)).report(name, tol, true)
    }

    /// Every sample of `[a, b]` evaluates to a finite value.
    pub fn defined(&self, f: &ScaleFunction, name: &str) -> HypothesisReport {
        let bad = self.closed().find(|&t| !f.eval(t).is_ok_and(f64::is_finite));
        HypothesisReport::new(name, if bad.is_some() { f64::NEG_INFINITY } else { 0.0 }, bad, 0.0, false)
    }

    /// Bounds on `ratio` over the samples: checks supplied bounds, or
    /// estimates them from the sampled extremes and widens them.
    pub fn bounds(
        &self,
        ratio: &ScaleFunction,
        given: Option<BoundsPair>,
        name: &str,
    ) -> Result<(Option<BoundsPair>, HypothesisReport, bool)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut failure = None;
        for t in self.closed() {
            match ratio.eval(t) {
                Ok(r) if r.is_finite() => {
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
                _ => {
                    failure = Some(t);
                    break;
                }
            }
        }
        let estimated = given.is_none();
        let bounds = match given {
            Some(b) => Some(b),
            None if failure.is_none() && lo > 0.0 => {
                Some(BoundsPair::new(lo * (1.0 - BOUNDS_WIDENING), hi * (1.0 + BOUNDS_WIDENING))?)
            }
            None => None,
        };
        let report = match (bounds, failure) {
            (Some(bp), None) => {
                let tol = self.check_tol(bp.big_m);
                Minimum::over(self.closed(), |t| {
                    let r = ratio.eval(t)?;
                    Ok((r - bp.m).min(bp.big_m - r))
                })
                .report(name, tol, false)
            }
            (_, Some(t)) => HypothesisReport::new(name, f64::NEG_INFINITY, Some(t), 0.0, false),
            (None, None) => {
                let at = self.closed().find(|&t| ratio.eval(t).is_ok_and(|r| r <= 0.0));
                HypothesisReport::new(name, lo.min(0.0), at, 0.0, true)
            }
        };
        Ok((bounds, report, estimated))
    }
}

pub(crate) fn positive_power(v: f64, e: f64) -> Result<f64> {
    if v < 0.0 || (v == 0.0 && e < 0.0) {
        return Err(Error::EvalDomain(format!("{v} raised to {e}")));
    }
    Ok(v.powf(e))
}
