use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inequalities::{CheckConfig, InequalityVerdict, Outcome, TheoremId};

use super::{gen_admissible, gen_scale, GenConfig, ReplayInstance};

/// Violations kept in a report, in trial order.
const MAX_KEPT_VIOLATIONS: usize = 20;
const MAX_KEPT_ERRORS: usize = 5;

#[derive(Debug, Clone)]
pub enum TrialOutcome {
    Checked {
        index: u64,
        instance: ReplayInstance,
        verdict: InequalityVerdict,
        /// The first verdict was a violation and was recomputed with tighter
        /// tolerances.
        rechecked: bool,
    },
    Failed {
        index: u64,
        message: String,
    },
}

/// Generate, check and triage one trial.
pub fn run_trial(theorem: TheoremId, cfg: &GenConfig, index: u64) -> TrialOutcome {
    let attempt = || -> Result<(ReplayInstance, InequalityVerdict, bool)> {
        let scale = gen_scale(cfg, index);
        let instance = gen_admissible(theorem, &scale, cfg, index)?;
        let verdict = instance.replay()?;
        if verdict.outcome != Outcome::Violated {
            return Ok((instance, verdict, false));
        }
        let tight = CheckConfig { quad_tol: cfg.check.quad_tol / 10.0, ..cfg.check };
        let again = instance.replay_with(&tight)?;
        Ok((instance, again, true))
    };
    match attempt() {
        Ok((instance, verdict, rechecked)) => TrialOutcome::Checked { index, instance, verdict, rechecked },
        Err(e) => TrialOutcome::Failed { index, message: e.to_string() },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub theorem_id: TheoremId,
    pub config: GenConfig,
    pub trials: u64,
    pub applicable: u64,
    pub holds: u64,
    pub violations: u64,
    /// Violations with `|slack| ≤ tol·(1 + |lhs| + |rhs|)`: only strictness
    /// failed to be confirmed.
    pub violations_within_tol: u64,
    pub hypothesis_failures: u64,
    pub errors: u64,
    /// Trials whose first verdict was a violation, recomputed with a 10×
    /// tighter quadrature tolerance.
    pub rechecked: u64,
    pub min_slack: Option<f64>,
    pub min_slack_instance: Option<ReplayInstance>,
    /// Smallest `slack / (1 + |lhs| + |rhs|)`.
    pub min_relative_slack: Option<f64>,
    pub equality_cases: u64,
    /// Largest `|slack| / (tol·(1 + |lhs| + |rhs|))` over equality cases.
    pub equality_max_scaled_slack: Option<f64>,
    /// Replay files for violations beyond the tolerance band.
    pub violation_instances: Vec<ReplayInstance>,
    pub within_tol_instances: Vec<ReplayInstance>,
    pub error_messages: Vec<String>,
}

impl CampaignReport {
    fn empty(theorem: TheoremId, cfg: &GenConfig, trials: u64) -> Self {
        Self {
            theorem_id: theorem,
            config: *cfg,
            trials,
            applicable: 0,
            holds: 0,
            violations: 0,
            violations_within_tol: 0,
            hypothesis_failures: 0,
            errors: 0,
            rechecked: 0,
            min_slack: None,
            min_slack_instance: None,
            min_relative_slack: None,
            equality_cases: 0,
            equality_max_scaled_slack: None,
            violation_instances: Vec::new(),
            within_tol_instances: Vec::new(),
            error_messages: Vec::new(),
        }
    }

    fn absorb(&mut self, outcome: TrialOutcome) {
        let (instance, verdict, rechecked) = match outcome {
            TrialOutcome::Failed { index, message } => {
                self.errors += 1;
                if self.error_messages.len() < MAX_KEPT_ERRORS {
                    self.error_messages.push(format!("trial {index}: {message}"));
                }
                return;
            }
            TrialOutcome::Checked { instance, verdict, rechecked, .. } => (instance, verdict, rechecked),
        };
        self.rechecked += u64::from(rechecked);
        match verdict.outcome {
            Outcome::NotApplicable => {
                self.hypothesis_failures += 1;
                return;
            }
            Outcome::Holds => self.holds += 1,
            Outcome::Violated => {
                self.violations += 1;
                let within = verdict.slack.abs() <= verdict.scaled_tol();
                self.violations_within_tol += u64::from(within);
                let kept = if within { &mut self.within_tol_instances } else { &mut self.violation_instances };
                if kept.len() < MAX_KEPT_VIOLATIONS {
                    kept.push(instance.clone());
                }
            }
        }
        self.applicable += 1;
        if instance.equality_case {
            self.equality_cases += 1;
            let scaled = verdict.slack.abs() / verdict.scaled_tol();
            self.equality_max_scaled_slack = Some(self.equality_max_scaled_slack.map_or(scaled, |m| m.max(scaled)));
        }
        let rel = verdict.relative_slack();
        if self.min_relative_slack.is_none_or(|m| rel < m) {
            self.min_relative_slack = Some(rel);
        }
        if self.min_slack.is_none_or(|m| verdict.slack < m) {
            self.min_slack = Some(verdict.slack);
            self.min_slack_instance = Some(instance);
        }
    }
}

/// Run `trials` independent trials in parallel and merge them in trial
/// order, so the report depends only on `(theorem, cfg, trials)`.
pub fn run_campaign(theorem: TheoremId, cfg: &GenConfig, trials: u64) -> Result<CampaignReport> {
    cfg.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..trials).into_par_iter().map(|i| run_trial(theorem, cfg, i)).collect();
    let mut report = CampaignReport::empty(theorem, cfg, trials);
    for o in outcomes {
        report.absorb(o);
    }
    Ok(report)
}
