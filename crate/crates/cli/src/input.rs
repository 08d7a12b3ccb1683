//! Scale and function loading from command-line values.

use std::fs;
use std::path::Path;

use chronoscale_core::{FunctionSpec, ScaleFunction, ScaleSpec, Tabulation, TimeScale};
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { context: path.display().to_string(), source })
}

/// Union of every `--scale` value.
pub fn load_scale(values: &[String]) -> CliResult<TimeScale> {
    if values.is_empty() {
        return Err(CliError::usage("at least one --scale is required"));
    }
    let parts = values
        .iter()
        .map(|v| match v.strip_prefix("file:") {
            Some(path) => {
                let spec: ScaleSpec = read_json(Path::new(path))?;
                Ok(spec.build()?)
            }
            None => Ok(ScaleSpec::from_shorthand(v)?.build()?),
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(TimeScale::union(parts.iter())?)
}

/// An expression in `x`, or `file:<path>` holding either a function spec
/// (`{"expr": ...}` / `{"table": ...}`) or a bare tabulation.
fn load_function_spec(text: &str) -> CliResult<FunctionSpec> {
    let Some(path) = text.strip_prefix("file:") else {
        ScaleFunction::parse(text)?;
        return Ok(FunctionSpec::Expr(text.trim().to_string()));
    };
    let value: serde_json::Value = read_json(Path::new(path))?;
    if let Ok(spec) = serde_json::from_value::<FunctionSpec>(value.clone()) {
        return Ok(spec);
    }
    serde_json::from_value::<Tabulation>(value)
        .map(FunctionSpec::Table)
        .map_err(|source| CliError::Json { context: path.to_string(), source })
}

pub fn load_function(text: &str) -> CliResult<ScaleFunction> {
    Ok(load_function_spec(text)?.build()?)
}

pub fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required here")))
}

/// Parse `lo..hi`.
pub fn parse_range<T: std::str::FromStr>(text: &str, flag: &str) -> CliResult<(T, T)> {
    let bad = || CliError::usage(format!("--{flag} expects `lo..hi`, got `{text}`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// Classical derivative of an expression, for the chain rule.
pub fn derivative(text: &str) -> CliResult<ScaleFunction> {
    let ast = chronoscale_core::parse(text).map_err(chronoscale_core::Error::from)?;
    Ok(ScaleFunction::from_expr(chronoscale_core::diff(&ast)?))
}
