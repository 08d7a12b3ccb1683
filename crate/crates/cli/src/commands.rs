use std::fs;

use chronoscale_core::calculus::{
    chain_rule_check, chain_rule_derivative, delta_derivative, delta_integral, fundamental_theorem_check, parts_check,
    product_quotient_check, second_delta_derivative, sigma_delta, substitution_check, IdentityResidual,
};
use chronoscale_core::inequalities::{akkouchi_witness, check, yin_qi_witness};
use chronoscale_core::{
    BoundsPair, CheckConfig, FunctionFamily, GenConfig, Instance, Outcome, ReplayInstance, ScaleFunction, TheoremId,
    TimeScale,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CheckArgs, EvalArgs, EvalOp, FalsifyArgs, FamilyArg, IdentityArgs, TheoremArg};
use crate::error::{CliError, CliResult};
use crate::input::{derivative, load_function, load_scale, parse_range, read_json, require};
use crate::output::{to_value, Report};

pub const EXIT_VIOLATION: u8 = 3;
pub const EXIT_NOT_APPLICABLE: u8 = 2;

impl From<TheoremArg> for TheoremId {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Holder => TheoremId::Holder,
            TheoremArg::RatioHolder => TheoremId::RatioHolder,
            TheoremArg::BoundedRatio => TheoremId::BoundedRatio,
            TheoremArg::PowerBounded => TheoremId::PowerBounded,
            TheoremArg::Qi => TheoremId::Qi,
            TheoremArg::Akkouchi => TheoremId::Akkouchi,
            TheoremArg::PmBound => TheoremId::PmBound,
            TheoremArg::YinQi => TheoremId::YinQi,
        }
    }
}

/// Prefix `fields` to the serialized form of `v`.
fn tagged<T: Serialize>(fields: Value, v: &T) -> CliResult<Value> {
    let mut out = fields;
    if let (Value::Object(o), Value::Object(extra)) = (&mut out, to_value(v)?) {
        o.extend(extra);
    }
    Ok(out)
}

pub fn eval(args: &EvalArgs) -> CliResult<Report> {
    let c = &args.common;
    let scale = load_scale(&c.scale)?;
    let f = || load_function(&require(args.f.clone(), "f")?);
    let t = || require(args.t, "t");
    let tol = c.tol;
    let result = match args.op {
        EvalOp::Delta => tagged(json!({"op": "delta", "t": t()?}), &delta_derivative(&f()?, &scale, t()?, tol)?)?,
        EvalOp::Delta2 => {
            tagged(json!({"op": "delta2", "t": t()?}), &second_delta_derivative(&f()?, &scale, t()?, tol)?)?
        }
        EvalOp::Integral => {
            let (a, b) = (c.a.unwrap_or(scale.min()), c.b.unwrap_or(scale.max()));
            tagged(json!({"op": "integral", "a": a, "b": b}), &delta_integral(&f()?, &scale, a, b, tol)?)?
        }
        EvalOp::Chain => {
            let text = require(args.f.clone(), "f")?;
            let outer = ScaleFunction::parse(&text)?;
            let fprime = derivative(&text)?;
            let g = load_function(&require(args.g.clone(), "g")?)?;
            let via_rule = chain_rule_derivative(&fprime, &g, &scale, t()?, tol)?;
            let direct = delta_derivative(&outer.compose(&g), &scale, t()?, tol)?;
            tagged(json!({"op": "chain", "t": t()?, "direct": direct.value}), &via_rule)?
        }
        EvalOp::Sigma => json!({"op": "sigma", "t": t()?, "value": scale.sigma(t()?)?}),
        EvalOp::Rho => json!({"op": "rho", "t": t()?, "value": scale.rho(t()?)?}),
        EvalOp::Mu => json!({"op": "mu", "t": t()?, "value": scale.mu(t()?)?}),
        EvalOp::SigmaDelta => tagged(json!({"op": "sigma_delta", "t": t()?}), &sigma_delta(&scale, t()?, tol)?)?,
        EvalOp::Classify => tagged(json!({"op": "classify", "t": t()?}), &scale.classify(t()?)?)?,
    };
    Ok(Report { command: "eval", seed: c.seed, result, csv_rows: "", exit: 0 })
}

fn outcome_exit(o: Outcome) -> u8 {
    match o {
        Outcome::Holds => 0,
        Outcome::NotApplicable => EXIT_NOT_APPLICABLE,
        Outcome::Violated => EXIT_VIOLATION,
    }
}

pub fn check_cmd(args: &CheckArgs) -> CliResult<Report> {
    let (scale, a, b, inst, mut cfg) = match &args.replay {
        Some(path) => {
            let r: ReplayInstance = read_json(path)?;
            (r.scale.clone(), r.a, r.b, r.instance()?, r.check)
        }
        None => {
            let scale = load_scale(&args.scale)?;
            let theorem: TheoremId = require(args.theorem, "theorem")?.into();
            let mut inst =
                Instance::new(theorem, load_function(&require(args.f.clone(), "f")?)?, require(args.p, "p")?);
            inst.q = args.q;
            if let Some(g) = &args.g {
                inst = inst.with_g(load_function(g)?);
            } else if theorem.needs_g() {
                return Err(CliError::usage(format!("{theorem} needs --g")));
            }
            inst.bounds = match (args.m, args.big_m) {
                (Some(m), Some(big_m)) => Some(BoundsPair::new(m, big_m)?),
                (None, None) => None,
                _ => return Err(CliError::usage("--m and --M go together")),
            };
            let cfg = args.tol.map_or_else(CheckConfig::default, CheckConfig::with_tol);
            (scale.clone(), args.a.unwrap_or(scale.min()), args.b.unwrap_or(scale.max()), inst, cfg)
        }
    };
    if args.replay.is_some() {
        if let Some(tol) = args.tol {
            cfg = CheckConfig { tol, quad_tol: tol / 10.0, ..cfg };
        }
    }
    if args.grid_step.is_some() {
        cfg.grid_step = args.grid_step;
    }
    let verdict = check(&scale, a, b, &cfg, &inst)?;
    let mut result = to_value(&verdict)?;
    if args.witness {
        let w = match inst.theorem {
            TheoremId::Akkouchi => to_value(&akkouchi_witness(&scale, a, b, &cfg, &inst.f)?)?,
            TheoremId::YinQi => to_value(&yin_qi_witness(&scale, a, b, &cfg, &inst.f)?)?,
            t => return Err(CliError::usage(format!("--witness is only available for akkouchi and yin_qi, not {t}"))),
        };
        if let Value::Object(o) = &mut result {
            o.insert("witness".into(), w);
        }
    }
    Ok(Report { command: "check", seed: args.seed, result, csv_rows: "", exit: outcome_exit(verdict.outcome) })
}

pub fn falsify(args: &FalsifyArgs) -> CliResult<Report> {
    let mut cfg = GenConfig::with_seed(args.seed);
    cfg.function_family = match args.family {
        FamilyArg::Polynomial => FunctionFamily::Polynomial,
        FamilyArg::ExpMix => FunctionFamily::ExpMix,
        FamilyArg::Cumulative => FunctionFamily::CumulativeConstruction,
    };
    if let Some(d) = args.dense_fraction {
        cfg.dense_fraction = d;
    }
    if let Some(s) = &args.segments {
        cfg.n_segments = parse_range(s, "segments")?;
    }
    if let Some(span) = args.span {
        cfg.domain_span = span;
    }
    if let Some(p) = &args.p_range {
        cfg.p_range = parse_range(p, "p-range")?;
    }
    cfg.check = CheckConfig::with_tol(args.tol);
    let theorem: TheoremId = args.theorem.into();
    let report = chronoscale_core::run_campaign(theorem, &cfg, args.trials)?;
    if let Some(dir) = &args.replay_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        let kept = report.violation_instances.iter().chain(&report.within_tol_instances);
        for (k, inst) in kept.enumerate() {
            let path = dir.join(format!("{theorem}-{k:03}.json"));
            let text = serde_json::to_string_pretty(inst)
                .map_err(|source| CliError::Json { context: path.display().to_string(), source })?;
            fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
        }
    }
    let exit = if report.violations > 0 { EXIT_VIOLATION } else { 0 };
    Ok(Report { command: "falsify", seed: Some(args.seed), result: to_value(&report)?, csv_rows: "", exit })
}

#[derive(Debug, Serialize)]
struct IdentityRow {
    identity: &'static str,
    /// Point for the pointwise rules; upper limit for the integral ones.
    t: f64,
    residual: Option<f64>,
    magnitude: Option<f64>,
    bound: Option<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl IdentityRow {
    fn new(identity: &'static str, t: f64, r: chronoscale_core::Result<IdentityResidual>, factor: f64) -> Self {
        match r {
            Ok(r) => {
                let bound = factor * (1.0 + r.magnitude);
                Self {
                    identity,
                    t,
                    residual: Some(r.residual),
                    magnitude: Some(r.magnitude),
                    bound: Some(bound),
                    status: if r.residual <= bound { "ok" } else { "exceeds" },
                    error: None,
                }
            }
            Err(e) => Self {
                identity,
                t,
                residual: None,
                magnitude: None,
                bound: None,
                status: "error",
                error: Some(e.to_string()),
            },
        }
    }
}

/// Samples of `[a, b]` used by the sweep.
fn sweep_points(scale: &TimeScale, grid_step: Option<f64>) -> Vec<f64> {
    match grid_step {
        Some(h) => scale.scale_points(h),
        None => scale.scale_points_per_segment(8),
    }
}

pub fn identities(args: &IdentityArgs) -> CliResult<Report> {
    let c = &args.common;
    let full = load_scale(&c.scale)?;
    let (a, b) = (c.a.unwrap_or(full.min()), c.b.unwrap_or(full.max()));
    let scale = if (a, b) == (full.min(), full.max()) { full } else { full.restrict(a, b)? };
    let f = load_function(&args.f)?;
    let g = load_function(&args.g)?;
    let v = load_function(&args.v)?;
    let fprime = derivative(&args.f)?;
    let factor = 10.0 * c.tol;
    let tol = c.tol;
    let mut rows = Vec::new();
    for t in sweep_points(&scale, c.grid_step) {
        if t > a {
            rows.push(IdentityRow::new(
                "fundamental_theorem",
                t,
                fundamental_theorem_check(&f, &scale, a, t, tol),
                factor,
            ));
            rows.push(IdentityRow::new("parts", t, parts_check(&f, &g, &scale, a, t, tol), factor));
        }
        if t == b && scale.classify(t)?.left == chronoscale_core::Density::Scattered {
            // Outside T^κ: no pointwise rules.
            continue;
        }
        match product_quotient_check(&f, &g, &scale, t, tol) {
            Ok(r) => {
                rows.push(IdentityRow::new("product", t, Ok(r.product), factor));
                rows.push(IdentityRow::new("quotient", t, Ok(r.quotient), factor));
            }
            Err(e) => {
                rows.push(IdentityRow::new("product", t, Err(e.clone()), factor));
                rows.push(IdentityRow::new("quotient", t, Err(e), factor));
            }
        }
        rows.push(IdentityRow::new("chain", t, chain_rule_check(&f, &fprime, &g, &scale, t, tol), factor));
        rows.push(IdentityRow::new("substitution", t, substitution_check(&v, &f, &scale, t, tol), factor));
    }
    let exceeded = rows.iter().filter(|r| r.status == "exceeds").count();
    let errors = rows.iter().filter(|r| r.status == "error").count();
    let result = json!({
        "f": args.f,
        "g": args.g,
        "v": args.v,
        "a": a,
        "b": b,
        "tol": tol,
        "bound_factor": factor,
        "checked": rows.len() - errors,
        "exceeded": exceeded,
        "errors": errors,
        "rows": to_value(&rows)?,
    });
    let exit = if exceeded > 0 { EXIT_VIOLATION } else { 0 };
    Ok(Report { command: "identities", seed: c.seed, result, csv_rows: "/rows", exit })
}
