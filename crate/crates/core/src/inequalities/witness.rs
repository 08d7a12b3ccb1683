//! The auxiliary functions whose monotonicity drives the proofs of the two
//! strongest results, evaluated numerically so their behaviour on a given
//! instance can be inspected.

use serde::Serialize;

use crate::calculus::{delta_derivative, delta_integral, verify_nondecreasing, MonotonicityReport};
use crate::error::Result;
use crate::function::ScaleFunction;
use crate::scale::TimeScale;

use super::domain::{Domain, Minimum};
use super::CheckConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkkouchiWitness {
    /// `F(a)`; zero by construction.
    pub value_at_a: f64,
    /// `F^Δ(a)` computed from `F` itself.
    pub delta_at_a: f64,
    /// `f(a) - μ(a)`, the closed form of `F^Δ(a)`.
    pub delta_at_a_expected: f64,
    /// Smallest sampled `F^ΔΔ` on `[a, b)`.
    pub min_second_delta: f64,
    pub min_second_delta_at: Option<f64>,
    pub monotonicity: MonotonicityReport,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YinQiWitness {
    /// `G(a)`.
    pub value_at_a: f64,
    /// Smallest `G^Δ = f - (f + f^σ) f^Δ / 2` over the samples of `(a, b)`.
    pub min_delta: f64,
    pub min_delta_at: Option<f64>,
    /// Largest gap between that closed form and `G^Δ` computed from `G`.
    pub delta_residual: f64,
    /// Smallest sampled `G` on `(a, b]`.
    pub min_value: f64,
    pub min_value_at: Option<f64>,
    pub holds: bool,
}

fn grid_step(dom: &Domain) -> f64 {
    dom.cfg.grid_step.unwrap_or_else(|| {
        let longest = dom.scale.segments().iter().map(|s| s.len()).fold(0.0, f64::max);
        longest / super::DEFAULT_SAMPLES_PER_SEGMENT as f64
    })
}

/// `F(x) = ∫_a^x f Δt - (x - a)²` with `F^Δ = f(x) - (x - a) - (σ(x) - a)`.
pub fn akkouchi_witness(
    scale: &TimeScale,
    a: f64,
    b: f64,
    cfg: &CheckConfig,
    f: &ScaleFunction,
) -> Result<AkkouchiWitness> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let quad = cfg.quad_tol;
    let big_f = {
        let (f, r) = (f.clone(), dom.scale.clone());
        let fd = f.clone();
        ScaleFunction::from_fn("F", move |x| Ok(delta_integral(&f, &r, a, x, quad)?.value - (x - a).powi(2)))
            .with_dense_delta(move |x| Ok(fd.eval(x)? - 2.0 * (x - a)))
    };
    let f_delta = {
        let (f, r) = (f.clone(), dom.scale.clone());
        let (fd, rd) = (f.clone(), dom.scale.clone());
        ScaleFunction::from_fn("F^delta", move |x| Ok(f.eval(x)? - (x - a) - (r.sigma(x)? - a)))
            .with_dense_delta(move |x| Ok(delta_derivative(&fd, &rd, x, quad)?.value - 2.0))
    };
    let value_at_a = big_f.eval(a)?;
    let delta_at_a = dom.delta(&big_f, a)?;
    let delta_at_a_expected = f.eval(a)? - dom.scale.mu(a)?;
    let second = Minimum::over(dom.closed().filter(|&t| t < b), |t| dom.delta(&f_delta, t));
    let monotonicity = verify_nondecreasing(&big_f, &dom.scale, a, b, grid_step(&dom), cfg.tol)?;
    let size = dom.sup_abs(f);
    let holds = value_at_a.abs() <= dom.check_tol(0.0)
        && delta_at_a >= -dom.check_tol(size)
        && !second.failed
        && second.value >= -dom.check_tol(size)
        && monotonicity.holds;
    Ok(AkkouchiWitness {
        value_at_a,
        delta_at_a,
        delta_at_a_expected,
        min_second_delta: second.value,
        min_second_delta_at: second.at,
        monotonicity,
        holds,
    })
}

/// `G(x) = ∫_a^x f Δt - f(x)²/2`.
pub fn yin_qi_witness(scale: &TimeScale, a: f64, b: f64, cfg: &CheckConfig, f: &ScaleFunction) -> Result<YinQiWitness> {
    let dom = Domain::new(scale, a, b, cfg)?;
    let quad = cfg.quad_tol;
    let big_g = {
        let (f, r) = (f.clone(), dom.scale.clone());
        let (fd, rd) = (f.clone(), dom.scale.clone());
        ScaleFunction::from_fn("G", move |x| Ok(delta_integral(&f, &r, a, x, quad)?.value - 0.5 * f.eval(x)?.powi(2)))
            .with_dense_delta(move |x| {
                let v = fd.eval(x)?;
                Ok(v - v * delta_derivative(&fd, &rd, x, quad)?.value)
            })
    };
    let f_sigma = f.compose_sigma(&dom.scale);
    let closed_form = |t: f64| -> Result<f64> {
        let v = f.eval(t)?;
        Ok(v - 0.5 * (v + f_sigma.eval(t)?) * dom.delta(f, t)?)
    };
    let value_at_a = big_g.eval(a)?;
    let mut residual: f64 = 0.0;
    let delta = Minimum::over(dom.open(), |t| {
        let c = closed_form(t)?;
        residual = residual.max((dom.delta(&big_g, t)? - c).abs());
        Ok(c)
    });
    let value = Minimum::over(dom.closed().filter(|&t| t > a), |t| big_g.eval(t));
    let size = dom.sup_abs(f).powi(2);
    let holds = value_at_a.abs() <= dom.check_tol(size)
        && !delta.failed
        && delta.value > dom.check_tol(size)
        && !value.failed
        && value.value > dom.check_tol(size);
    Ok(YinQiWitness {
        value_at_a,
        min_delta: delta.value,
        min_delta_at: delta.at,
        delta_residual: residual,
        min_value: value.value,
        min_value_at: value.at,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Tabulation;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn akkouchi_lattice_witness() {
        let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
        let w = akkouchi_witness(&t, 0.0, 3.0, &cfg(), &ScaleFunction::parse("2*x+1").unwrap()).unwrap();
        assert_eq!(w.value_at_a, 0.0);
        assert_eq!((w.delta_at_a, w.delta_at_a_expected), (0.0, 0.0));
        assert_eq!(w.min_second_delta, 0.0);
        assert!(w.monotonicity.holds && w.holds, "{w:?}");
    }

    #[test]
    fn akkouchi_witness_flags_zero_function() {
        let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
        let w = akkouchi_witness(&t, 0.0, 3.0, &cfg(), &ScaleFunction::constant(0.0)).unwrap();
        assert_eq!(w.delta_at_a_expected, -1.0);
        assert!(!w.holds);
    }

    #[test]
    fn akkouchi_dense_boundary_case() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let w = akkouchi_witness(&t, 0.0, 1.0, &cfg(), &ScaleFunction::parse("2*x").unwrap()).unwrap();
        assert_eq!(w.delta_at_a_expected, 0.0);
        assert!(w.min_second_delta.abs() < 1e-8);
        assert!(w.holds, "{w:?}");
    }

    #[test]
    fn yin_qi_dense_witness() {
        let t = TimeScale::interval(0.0, 1.0).unwrap();
        let w = yin_qi_witness(&t, 0.0, 1.0, &cfg(), &ScaleFunction::parse("x/2").unwrap()).unwrap();
        assert_eq!(w.value_at_a, 0.0);
        // G(x) = x²/8, so the smallest sample on (0, 1] is at the first grid point.
        let h = 1.0 / 64.0;
        assert!((w.min_value - h * h / 8.0).abs() < 1e-12);
        assert!(w.delta_residual < 1e-8);
        assert!(w.holds, "{w:?}");
    }

    #[test]
    fn yin_qi_lattice_witness_dips_below_zero() {
        let t = TimeScale::lattice(0.0, 3.0, 1.0).unwrap();
        let tab = Tabulation::on_scale(&t, vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.0), (3.0, 1.5)]).unwrap();
        let w = yin_qi_witness(&t, 0.0, 3.0, &cfg(), &ScaleFunction::tabulated(tab)).unwrap();
        assert_eq!(w.min_value, -0.125);
        assert_eq!(w.min_value_at, Some(1.0));
        assert!(!w.holds);
    }
}
