//! Hypothesis-checked verdicts for Hölder- and Qi-type delta-integral
//! inequalities, and diagnostics for the auxiliary functions used in their
//! proofs.
//!
//! Pointwise hypotheses on dense segments cannot be decided for arbitrary
//! functions, so every check samples them on scale points (every scattered
//! point plus a grid on each dense segment). A verdict only counts when all
//! sampled hypotheses pass; otherwise it is reported as not applicable.

mod checks;
mod domain;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    check, check_akkouchi_ts, check_bounded_ratio, check_holder, check_pm_bound, check_power_bounded, check_qi,
    check_ratio_holder, check_yin_qi_strict, Instance,
};
pub use witness::{akkouchi_witness, yin_qi_witness, AkkouchiWitness, YinQiWitness};

/// Tolerance below which `1/p + 1/q` counts as `1`.
pub const CONJUGATE_TOL: f64 = 1e-12;
/// Relative widening applied to estimated bounds.
pub const BOUNDS_WIDENING: f64 = 1e-9;
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Holder,
    RatioHolder,
    BoundedRatio,
    PowerBounded,
    Qi,
    Akkouchi,
    PmBound,
    YinQi,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::Holder,
        TheoremId::RatioHolder,
        TheoremId::BoundedRatio,
        TheoremId::PowerBounded,
        TheoremId::Qi,
        TheoremId::Akkouchi,
        TheoremId::PmBound,
        TheoremId::YinQi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Holder => "holder",
            TheoremId::RatioHolder => "ratio_holder",
            TheoremId::BoundedRatio => "bounded_ratio",
            TheoremId::PowerBounded => "power_bounded",
            TheoremId::Qi => "qi",
            TheoremId::Akkouchi => "akkouchi",
            TheoremId::PmBound => "pm_bound",
            TheoremId::YinQi => "yin_qi",
        }
    }

    /// Whether the check takes a second function `g`.
    pub fn needs_g(self) -> bool {
        matches!(self, TheoremId::Holder | TheoremId::RatioHolder | TheoremId::BoundedRatio | TheoremId::PowerBounded)
    }

    pub fn strict(self) -> bool {
        self == TheoremId::YinQi
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s || t.name().replace('_', "-") == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

/// Conjugate exponents `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
}

impl ExponentPair {
    /// The conjugate of `p`. Any finite `p` other than 0 and 1 has one; use
    /// [`is_admissible`](Self::is_admissible) for the regime.
    pub fn conjugate(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 0.0 || p == 1.0 {
            return Err(Error::BadExponents(format!("p = {p} has no finite conjugate")));
        }
        Ok(Self { p, q: p / (p - 1.0) })
    }

    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) || p == 0.0 || q == 0.0 {
            return Err(Error::BadExponents(format!("p = {p}, q = {q}")));
        }
        let defect = (1.0 / p + 1.0 / q - 1.0).abs();
        if defect > CONJUGATE_TOL {
            return Err(Error::BadExponents(format!("1/p + 1/q - 1 = {defect:e} for p = {p}, q = {q}")));
        }
        Ok(Self { p, q })
    }

    /// `p > 1` (so `q > 1`) or `p < 0` (so `0 < q < 1`).
    pub fn is_admissible(&self) -> bool {
        self.p > 1.0 || self.p < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsPair {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl BoundsPair {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if !(m > 0.0 && m <= big_m && big_m.is_finite()) {
            return Err(Error::BadBounds { m, big_m });
        }
        Ok(Self { m, big_m })
    }

    pub fn ratio(&self) -> f64 {
        self.big_m / self.m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub name: String,
    pub satisfied: bool,
    /// Signed; non-negative when the sampled condition holds.
    pub margin: f64,
    /// Sample where the margin was attained.
    pub witness_point: Option<f64>,
    /// A strict condition (`>` or `<`) needs `margin > check_tol`; others
    /// need `margin ≥ -check_tol`.
    pub strict: bool,
    pub check_tol: f64,
}

impl HypothesisReport {
    pub fn new(name: impl Into<String>, margin: f64, witness_point: Option<f64>, check_tol: f64, strict: bool) -> Self {
        let satisfied = if strict { margin > check_tol } else { margin >= -check_tol };
        Self { name: name.into(), satisfied, margin, witness_point, strict, check_tol }
    }
}

/// Tolerances and hypothesis sampling for a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Verdict tolerance, relative to `1 + |lhs| + |rhs|`.
    pub tol: f64,
    /// Quadrature and derivative tolerance.
    pub quad_tol: f64,
    /// Maximum sample spacing on dense segments; `None` means
    /// [`DEFAULT_SAMPLES_PER_SEGMENT`] samples per segment.
    pub grid_step: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { tol: 1e-9, quad_tol: 1e-10, grid_step: None }
    }
}

impl CheckConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, quad_tol: tol / 10.0, grid_step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Violated,
    NotApplicable,
}

/// A secondary inequality checked along the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxInequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Equality-case diagnostics for the ratio form of Hölder's inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub near_equality: bool,
    /// `f ≈ c·g` on the samples.
    pub proportional: bool,
    /// `(max f/g - min f/g) / mean f/g` over the samples.
    pub ratio_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub theorem: TheoremId,
    pub outcome: Outcome,
    pub hypotheses: Vec<HypothesisReport>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`, oriented so that the inequality asserts `slack ≥ 0`.
    pub slack: f64,
    /// `None` when a hypothesis failed.
    pub holds: Option<bool>,
    pub applicable: bool,
    pub strict_required: bool,
    pub tol: f64,
    pub a: f64,
    pub b: f64,
    pub scale_digest: String,
    pub function_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_text: Option<String>,
    pub p: f64,
    pub q: Option<f64>,
    pub m: Option<f64>,
    #[serde(rename = "M")]
    pub big_m: Option<f64>,
    pub bounds_estimated: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub aux: Vec<AuxInequality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality: Option<EqualityReport>,
    /// Number of scale points at which the hypotheses were sampled.
    pub hypothesis_samples: usize,
}

impl InequalityVerdict {
    /// `tol · (1 + |lhs| + |rhs|)`.
    pub fn scaled_tol(&self) -> f64 {
        scaled_tol(self.tol, self.lhs, self.rhs)
    }

    pub fn is_violation(&self) -> bool {
        self.outcome == Outcome::Violated
    }

    /// Slack divided by `1 + |lhs| + |rhs|`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / (1.0 + self.lhs.abs() + self.rhs.abs())
    }
}

pub(crate) fn scaled_tol(tol: f64, lhs: f64, rhs: f64) -> f64 {
    tol * (1.0 + lhs.abs() + rhs.abs())
}

pub(crate) fn compare(lhs: f64, rhs: f64, tol: f64, strict: bool) -> bool {
    let slack = lhs - rhs;
    let s = scaled_tol(tol, lhs, rhs);
    if strict {
        slack > s
    } else {
        slack >= -s
    }
}
