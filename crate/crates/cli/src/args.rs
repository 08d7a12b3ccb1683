use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "chronoscale", version, about = "Delta calculus on time scales and checked integral inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Delta derivative, integral, chain rule or jump operators.
    Eval(EvalArgs),
    /// Check one inequality on one instance.
    Check(CheckArgs),
    /// Run a randomized campaign against one inequality.
    Falsify(FalsifyArgs),
    /// Residuals of the calculus identities over a scale.
    Identities(IdentityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scale shorthand (`interval:a..b`, `lattice:a..b:step`,
    /// `geometric:q:min..max`) or `file:<path>`; repeat for a union.
    #[arg(long = "scale", required = true)]
    pub scale: Vec<String>,
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    #[arg(long, env = "CHRONOSCALE_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalOp {
    Delta,
    Delta2,
    Integral,
    Chain,
    Sigma,
    Rho,
    Mu,
    SigmaDelta,
    Classify,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub op: EvalOp,
    /// Expression in `x`, or `file:<path>` holding a tabulation.
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Inner function for `--op chain`.
    #[arg(long = "g", allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    Holder,
    RatioHolder,
    BoundedRatio,
    PowerBounded,
    Qi,
    Akkouchi,
    PmBound,
    YinQi,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, required_unless_present = "replay")]
    pub theorem: Option<TheoremArg>,
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long = "g", allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "p", allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long = "q", allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long = "m")]
    pub m: Option<f64>,
    #[arg(long = "M")]
    pub big_m: Option<f64>,
    /// Also report the auxiliary function from the proof (akkouchi, yin_qi).
    #[arg(long)]
    pub witness: bool,
    /// Replay a saved instance instead of building one from flags.
    #[arg(long, conflicts_with_all = ["theorem", "f", "g", "p", "q", "m", "big_m", "scale", "a", "b"])]
    pub replay: Option<PathBuf>,
    #[arg(long = "scale")]
    pub scale: Vec<String>,
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    #[arg(long, env = "CHRONOSCALE_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Polynomial,
    ExpMix,
    Cumulative,
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    #[arg(long, env = "CHRONOSCALE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Polynomial)]
    pub family: FamilyArg,
    #[arg(long = "dense-fraction")]
    pub dense_fraction: Option<f64>,
    /// Inclusive range of pieces per generated scale, `lo..hi`.
    #[arg(long)]
    pub segments: Option<String>,
    #[arg(long)]
    pub span: Option<f64>,
    /// Exponent range for the `p > 1` regime, `lo..hi`.
    #[arg(long = "p-range")]
    pub p_range: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Directory for one replay file per violation.
    #[arg(long = "replay-dir")]
    pub replay_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long = "f", allow_hyphen_values = true, default_value = "x^2+1")]
    pub f: String,
    #[arg(long = "g", allow_hyphen_values = true, default_value = "exp(x/4)")]
    pub g: String,
    /// Strictly increasing map for the substitution rule.
    #[arg(long = "v", allow_hyphen_values = true, default_value = "2*x+1")]
    pub v: String,
    #[command(flatten)]
    pub common: Common,
}
