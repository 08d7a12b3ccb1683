//! Numerical calculus on bounded time scales and hypothesis-checked verdicts
//! for Hölder- and Qi-type delta-integral inequalities.

// `!(x > y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait, clippy::large_enum_variant)]

pub mod calculus;
pub mod error;
pub mod expr;
pub mod function;
pub mod inequalities;
pub mod quadrature;
pub mod scale;
pub mod scale_file;
pub mod search;

pub use calculus::{DeltaResult, IdentityResidual, IntegralResult};
pub use error::{Error, Result};
pub use expr::{diff, parse, Expr, Func, ParseError};
pub use function::{FunctionSpec, ScaleFunction, Tabulation};
pub use inequalities::{
    BoundsPair, CheckConfig, ExponentPair, HypothesisReport, InequalityVerdict, Instance, Outcome, TheoremId,
};
pub use scale::{Density, PointClass, Segment, TimeScale};
pub use scale_file::{scale_from_json, ScaleSpec};
pub use search::{run_campaign, CampaignReport, FunctionFamily, GenConfig, ReplayInstance};
