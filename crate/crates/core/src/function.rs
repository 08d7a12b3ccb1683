//! Real-valued functions evaluated on a time scale.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::scale::TimeScale;

type PointFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Point values on a time scale, linearly interpolated inside dense segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulationRepr", into = "TabulationRepr")]
pub struct Tabulation {
    scale: TimeScale,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `linear[i]`: the open gap `(xs[i], xs[i+1])` lies in one dense segment.
    linear: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct TabulationRepr {
    scale: TimeScale,
    points: Vec<[f64; 2]>,
}

impl TryFrom<TabulationRepr> for Tabulation {
    type Error = Error;
    fn try_from(r: TabulationRepr) -> Result<Self> {
        Tabulation::on_scale(&r.scale, r.points.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl From<Tabulation> for TabulationRepr {
    fn from(t: Tabulation) -> Self {
        TabulationRepr { points: t.xs.iter().zip(&t.ys).map(|(&x, &y)| [x, y]).collect(), scale: t.scale }
    }
}

impl Tabulation {
    /// Build from `(point, value)` pairs, all of which must lie in `scale`.
    pub fn on_scale(scale: &TimeScale, mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidTabulation("no points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidTabulation(format!("duplicate point {}", w[0].0)));
            }
        }
        for &(x, y) in &points {
            if !scale.contains(x) {
                return Err(Error::NotInScale { t: x });
            }
            if !y.is_finite() {
                return Err(Error::InvalidTabulation(format!("non-finite value at {x}")));
            }
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let linear = xs
            .windows(2)
            .map(|w| match (scale.segment_index(w[0]), scale.segment_index(w[1])) {
                (Some(i), Some(j)) => i == j,
                _ => false,
            })
            .collect();
        Ok(Self { scale: scale.clone(), xs, ys, linear })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.xs.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => Ok(self.ys[i]),
            Err(i) if i > 0 && i < self.xs.len() && self.linear[i - 1] => {
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let (y0, y1) = (self.ys[i - 1], self.ys[i]);
                Ok(y0 + (y1 - y0) * (t - x0) / (x1 - x0))
            }
            Err(_) => Err(Error::TabulationGap { t }),
        }
    }

    /// Slope of the linear piece starting at or containing `t`, if any.
    pub fn right_slope(&self, t: f64) -> Option<f64> {
        let i = match self.xs.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) if i > 0 => i - 1,
            Err(_) => return None,
        };
        (i + 1 < self.xs.len() && self.linear[i]).then(|| (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]))
    }

    /// Slope of the linear piece ending at `t`, if any.
    pub fn left_slope(&self, t: f64) -> Option<f64> {
        let i = match self.xs.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) | Err(i) => i,
        };
        (i > 0 && i < self.xs.len() && self.linear[i - 1])
            .then(|| (self.ys[i] - self.ys[i - 1]) / (self.xs[i] - self.xs[i - 1]))
    }
}

/// Serializable description of a function, for reports and replay files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    Expr(String),
    Table(Tabulation),
}

impl FunctionSpec {
    pub fn build(&self) -> Result<ScaleFunction> {
        match self {
            FunctionSpec::Expr(text) => ScaleFunction::parse(text),
            FunctionSpec::Table(t) => Ok(ScaleFunction::tabulated(t.clone())),
        }
    }
}

#[derive(Clone)]
enum Body {
    Expr { ast: Expr, text: String },
    Table(Tabulation),
    Sigma { inner: Arc<ScaleFunction>, scale: Arc<TimeScale> },
    Closure { label: String, eval: PointFn, dense_eval: Option<PointFn>, dense_delta: Option<PointFn> },
}

/// A function on a time scale: an expression, a tabulation, `f ∘ σ`, or a
/// native closure.
#[derive(Clone)]
pub struct ScaleFunction {
    body: Body,
}

impl fmt::Debug for ScaleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScaleFunction({})", self.label())
    }
}

impl ScaleFunction {
    pub fn parse(text: &str) -> Result<Self> {
        let ast = expr::parse(text)?;
        Ok(Self { body: Body::Expr { ast, text: text.trim().to_string() } })
    }

    pub fn from_expr(ast: Expr) -> Self {
        let text = ast.to_string();
        Self { body: Body::Expr { ast, text } }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(Expr::Const(c))
    }

    pub fn tabulated(t: Tabulation) -> Self {
        Self { body: Body::Table(t) }
    }

    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self { body: Body::Closure { label: label.into(), eval: Arc::new(f), dense_eval: None, dense_delta: None } }
    }

    /// Attach the delta derivative to use at right-dense points.
    ///
    /// Only meaningful for closures; other bodies are returned unchanged.
    pub fn with_dense_delta(mut self, d: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        if let Body::Closure { dense_delta, .. } = &mut self.body {
            *dense_delta = Some(Arc::new(d));
        }
        self
    }

    /// Attach the value to use when integrating over a dense segment (the
    /// left limit at a right-scattered segment end).
    pub fn with_dense_eval(mut self, d: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        if let Body::Closure { dense_eval, .. } = &mut self.body {
            *dense_eval = Some(Arc::new(d));
        }
        self
    }

    pub fn label(&self) -> String {
        match &self.body {
            Body::Expr { text, .. } => text.clone(),
            Body::Table(t) => format!("table[{} points]", t.xs.len()),
            Body::Sigma { inner, .. } => format!("({})^sigma", inner.label()),
            Body::Closure { label, .. } => label.clone(),
        }
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match &self.body {
            Body::Expr { ast, .. } => Some(ast),
            _ => None,
        }
    }

    pub fn as_table(&self) -> Option<&Tabulation> {
        match &self.body {
            Body::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn spec(&self) -> Option<FunctionSpec> {
        match &self.body {
            Body::Expr { text, .. } => Some(FunctionSpec::Expr(text.clone())),
            Body::Table(t) => Some(FunctionSpec::Table(t.clone())),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.body {
            Body::Expr { ast, .. } => ast.eval(t),
            Body::Table(tab) => tab.eval(t),
            Body::Sigma { inner, scale } => inner.eval(scale.sigma(t)?),
            Body::Closure { eval, .. } => eval(t),
        }
    }

    /// Value used by quadrature on a dense segment. Equals [`eval`](Self::eval)
    /// except where the function jumps at a right-scattered segment end, where
    /// the left limit is returned.
    pub fn eval_on_dense(&self, t: f64) -> Result<f64> {
        match &self.body {
            Body::Sigma { inner, .. } => inner.eval_on_dense(t),
            Body::Closure { dense_eval: Some(d), .. } => d(t),
            _ => self.eval(t),
        }
    }

    /// Exact delta derivative at a right-dense `t`, when the body knows it.
    pub(crate) fn known_dense_delta(&self, t: f64, backward: bool) -> Option<Result<f64>> {
        match &self.body {
            Body::Table(tab) => {
                let s = if backward { tab.left_slope(t) } else { tab.right_slope(t) };
                Some(s.ok_or(Error::TabulationGap { t }))
            }
            Body::Sigma { inner, .. } => inner.known_dense_delta(t, backward),
            Body::Closure { dense_delta: Some(d), .. } => Some(d(t)),
            _ => None,
        }
    }

    /// `f ∘ σ` on `scale`.
    pub fn compose_sigma(&self, scale: &TimeScale) -> ScaleFunction {
        ScaleFunction { body: Body::Sigma { inner: Arc::new(self.clone()), scale: Arc::new(scale.clone()) } }
    }

    /// Pointwise combination; stays symbolic when both sides are expressions.
    fn combine(
        &self,
        other: &ScaleFunction,
        sym: fn(Expr, Expr) -> Expr,
        op: fn(f64, f64) -> Result<f64>,
        name: &str,
    ) -> ScaleFunction {
        if let (Some(a), Some(b)) = (self.as_expr(), other.as_expr()) {
            return ScaleFunction::from_expr(sym(a.clone(), b.clone()));
        }
        let (f, g) = (self.clone(), other.clone());
        let (fd, gd) = (self.clone(), other.clone());
        ScaleFunction::from_fn(format!("({}) {name} ({})", self.label(), other.label()), move |t| {
            op(f.eval(t)?, g.eval(t)?)
        })
        .with_dense_eval(move |t| op(fd.eval_on_dense(t)?, gd.eval_on_dense(t)?))
    }

    pub fn mul(&self, other: &ScaleFunction) -> ScaleFunction {
        self.combine(other, Expr::mul, |a, b| Ok(a * b), "*")
    }

    pub fn div(&self, other: &ScaleFunction) -> ScaleFunction {
        self.combine(
            other,
            Expr::div,
            |a, b| {
                if b == 0.0 {
                    Err(Error::EvalDomain("division by zero".into()))
                } else {
                    Ok(a / b)
                }
            },
            "/",
        )
    }

    /// Pointwise `t ↦ op(self(t), other(t))`.
    pub fn zip_with(
        &self,
        other: &ScaleFunction,
        label: &str,
        op: impl Fn(f64, f64) -> Result<f64> + Send + Sync + Clone + 'static,
    ) -> ScaleFunction {
        let (f, g) = (self.clone(), other.clone());
        let (fd, gd) = (self.clone(), other.clone());
        let od = op.clone();
        ScaleFunction::from_fn(format!("{label}({}, {})", self.label(), other.label()), move |t| {
            op(f.eval(t)?, g.eval(t)?)
        })
        .with_dense_eval(move |t| od(fd.eval_on_dense(t)?, gd.eval_on_dense(t)?))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ScaleFunction) -> ScaleFunction {
        if let (Some(a), Some(b)) = (self.as_expr(), inner.as_expr()) {
            return ScaleFunction::from_expr(a.substitute(b));
        }
        let (f, g) = (self.clone(), inner.clone());
        ScaleFunction::from_fn(format!("({})∘({})", self.label(), inner.label()), move |t| f.eval(g.eval(t)?))
    }

    /// Pointwise `t ↦ h(f(t))` for a plain numeric map `h`.
    pub fn map(&self, label: &str, h: impl Fn(f64) -> Result<f64> + Send + Sync + Clone + 'static) -> ScaleFunction {
        let (f, fd) = (self.clone(), self.clone());
        let hd = h.clone();
        ScaleFunction::from_fn(format!("{label}({})", self.label()), move |t| h(f.eval(t)?))
            .with_dense_eval(move |t| hd(fd.eval_on_dense(t)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::Segment;

    fn mixed() -> TimeScale {
        TimeScale::new([Segment::new(0.0, 1.0).unwrap(), Segment::point(2.0).unwrap()]).unwrap()
    }

    #[test]
    fn expression_functions() {
        let f = ScaleFunction::parse("x^2+3*x").unwrap();
        assert_eq!(f.eval(2.0).unwrap(), 10.0);
        assert_eq!(ScaleFunction::parse("1").unwrap().eval(-7.0).unwrap(), 1.0);
        assert!(matches!(ScaleFunction::parse("ln(x)").unwrap().eval(-1.0), Err(Error::EvalDomain(_))));
    }

    #[test]
    fn tabulation_interpolates_only_inside_dense_segments() {
        let t = mixed();
        let tab = Tabulation::on_scale(&t, vec![(0.0, 0.0), (1.0, 2.0), (2.0, 10.0)]).unwrap();
        let f = ScaleFunction::tabulated(tab.clone());
        assert_eq!(f.eval(0.25).unwrap(), 0.5);
        assert_eq!(f.eval(2.0).unwrap(), 10.0);
        assert_eq!(tab.right_slope(0.5), Some(2.0));
        assert_eq!(tab.right_slope(1.0), None);
        assert_eq!(tab.left_slope(1.0), Some(2.0));
        let gap = Tabulation::on_scale(&t, vec![(0.5, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(gap.eval(0.25), Err(Error::TabulationGap { t: 0.25 }));
        assert!(matches!(Tabulation::on_scale(&t, vec![(1.5, 0.0)]), Err(Error::NotInScale { .. })));
    }

    #[test]
    fn compose_sigma_shifts_on_lattices() {
        let lat = TimeScale::lattice(0.0, 3.0, 0.5).unwrap();
        let f = ScaleFunction::parse("x").unwrap();
        let fs = f.compose_sigma(&lat);
        assert_eq!(fs.eval(1.0).unwrap(), 1.5);
        assert_eq!(fs.eval(3.0).unwrap(), 3.0);
        let dense = TimeScale::interval(0.0, 1.0).unwrap();
        let g = ScaleFunction::parse("exp(x)").unwrap().compose_sigma(&dense);
        assert_eq!(g.eval(0.3).unwrap(), 0.3f64.exp());
        let c = ScaleFunction::constant(4.0).compose_sigma(&lat);
        assert_eq!(c.eval(0.5).unwrap(), 4.0);
        // left limit at a right-scattered segment end
        let s = ScaleFunction::parse("x").unwrap().compose_sigma(&mixed());
        assert_eq!(s.eval(1.0).unwrap(), 2.0);
        assert_eq!(s.eval_on_dense(1.0).unwrap(), 1.0);
    }

    #[test]
    fn combinators() {
        let f = ScaleFunction::parse("x+1").unwrap();
        let g = ScaleFunction::parse("x").unwrap();
        assert_eq!(f.mul(&g).eval(2.0).unwrap(), 6.0);
        assert!(f.mul(&g).as_expr().is_some());
        assert_eq!(f.compose(&g.mul(&g)).eval(3.0).unwrap(), 10.0);
        let tab =
            ScaleFunction::tabulated(Tabulation::on_scale(&mixed(), vec![(0.0, 1.0), (1.0, 3.0), (2.0, 0.0)]).unwrap());
        assert_eq!(f.div(&tab).eval(0.5).unwrap(), 0.75);
        assert!(f.div(&tab).eval(2.0).is_err());
        assert_eq!(tab.map("sq", |v| Ok(v * v)).eval(1.0).unwrap(), 9.0);
    }

    #[test]
    fn specs_round_trip() {
        let tab = Tabulation::on_scale(&mixed(), vec![(0.0, 1.0), (1.0, 3.0), (2.0, 0.0)]).unwrap();
        let spec = FunctionSpec::Table(tab);
        let json = serde_json::to_string(&spec).unwrap();
        let back: FunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().eval(0.5).unwrap(), 2.0);
    }
}
