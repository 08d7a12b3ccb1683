//! Random time scales, hypothesis-admissible instances and falsification
//! campaigns.
//!
//! All randomness for trial `i` comes from a ChaCha stream keyed by
//! `(seed, i)`, so a campaign gives the same report whether its trials run
//! serially or in parallel.

mod campaign;
mod generate;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::inequalities::{check, BoundsPair, CheckConfig, InequalityVerdict, Instance, TheoremId};
use crate::scale::TimeScale;

pub use campaign::{run_campaign, run_trial, CampaignReport, TrialOutcome};
pub use generate::{gen_admissible, gen_equality_case, gen_inadmissible, gen_scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionFamily {
    Polynomial,
    ExpMix,
    CumulativeConstruction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Inclusive range for the number of pieces (dense segments or point
    /// clusters) in a generated scale.
    pub n_segments: (usize, usize),
    /// Probability that a piece is a dense segment.
    pub dense_fraction: f64,
    pub domain_span: f64,
    pub function_family: FunctionFamily,
    /// Range for exponents drawn for the `p > 1` regime.
    pub p_range: (f64, f64),
    pub check: CheckConfig,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_segments: (1, 6),
            dense_fraction: 0.4,
            domain_span: 4.0,
            function_family: FunctionFamily::Polynomial,
            p_range: (1.1, 4.0),
            check: CheckConfig::default(),
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.n_segments;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidScaleSpec(format!("segment count range {lo}..={hi}")));
        }
        if !(0.0..=1.0).contains(&self.dense_fraction) {
            return Err(Error::InvalidScaleSpec(format!("dense fraction {}", self.dense_fraction)));
        }
        if !(self.domain_span > 0.0 && self.domain_span.is_finite()) {
            return Err(Error::InvalidScaleSpec(format!("domain span {}", self.domain_span)));
        }
        let (p0, p1) = self.p_range;
        if !(p0 > 1.0 && p0 <= p1 && p1.is_finite()) {
            return Err(Error::BadExponents(format!("p range ({p0}, {p1}) must lie in (1, ∞)")));
        }
        Ok(())
    }

    /// Independent stream for `(index, purpose)`.
    pub(crate) fn rng(&self, index: u64, purpose: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index.wrapping_mul(4).wrapping_add(purpose));
        rng
    }
}

/// A self-contained check instance that can be saved and replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayInstance {
    pub theorem: TheoremId,
    pub scale: TimeScale,
    pub a: f64,
    pub b: f64,
    pub f: FunctionSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<FunctionSpec>,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<BoundsPair>,
    /// Generated as an equality case (`f` proportional to `g`, or the Hölder
    /// equality condition).
    #[serde(default)]
    pub equality_case: bool,
    pub check: CheckConfig,
}

impl ReplayInstance {
    pub fn instance(&self) -> Result<Instance> {
        let mut inst = Instance::new(self.theorem, self.f.build()?, self.p).with_bounds(self.bounds);
        inst.q = self.q;
        if let Some(g) = &self.g {
            inst = inst.with_g(g.build()?);
        }
        Ok(inst)
    }

    pub fn replay(&self) -> Result<InequalityVerdict> {
        self.replay_with(&self.check)
    }

    pub fn replay_with(&self, cfg: &CheckConfig) -> Result<InequalityVerdict> {
        check(&self.scale, self.a, self.b, cfg, &self.instance()?)
    }
}
