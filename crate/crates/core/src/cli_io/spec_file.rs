use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::PowerFamily;
use crate::problem::{NonlinearitySpec, Potential, ProblemSpec};
use crate::solver::MountainPassConfig;

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub a: f64,
    pub b: f64,
    pub p: u32,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_len: f64,
    #[serde(rename = "N")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_log10: Option<f64>,
    pub potential: Potential,
    pub nonlinearity: NonlinearitySpec,
    /// Overrides `solver.grid_m` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default)]
    pub solver: MountainPassConfig,
}

impl SpecFile {
    pub fn from_problem(spec: &ProblemSpec, solver: MountainPassConfig) -> Self {
        Self {
            a: spec.a,
            b: spec.b,
            p: spec.p,
            alpha: spec.alpha,
            t_len: spec.t_len,
            dim: spec.dim,
            lambda_log10: None,
            potential: spec.potential.clone(),
            nonlinearity: spec.nonlinearity.clone(),
            grid_m: None,
            solver,
        }
    }

    /// The problem, validated against every structural hypothesis.
    pub fn problem(&self) -> Result<ProblemSpec> {
        let spec = ProblemSpec {
            a: self.a,
            b: self.b,
            p: self.p,
            alpha: self.alpha,
            t_len: self.t_len,
            dim: self.dim,
            potential: self.potential.clone(),
            nonlinearity: self.nonlinearity.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Solver settings with the top-level `grid_m` applied.
    pub fn solver_config(&self) -> MountainPassConfig {
        let mut cfg = self.solver.clone();
        if let Some(m) = self.grid_m {
            cfg.grid_m = m;
        }
        cfg
    }

    /// Parses JSON; errors name the offending key path and the line/column.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                return Error::Parse(inner.to_string());
            }
            let path = refine_path(text, &path).unwrap_or(path);
            Error::Parse(format!("at key `{path}`: {inner}"))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }
}

/// Tagged sections are buffered before they are decoded, so the reported path stops at
/// the section; decoding the section on its own recovers the inner key.
fn refine_path(text: &str, path: &str) -> Option<String> {
    if path != "nonlinearity" {
        return None;
    }
    let mut section = serde_json::from_str::<serde_json::Value>(text)
        .ok()?
        .get(path)?
        .clone();
    let kind = section.as_object_mut()?.remove("kind")?;
    if kind != "power" {
        return None;
    }
    match serde_path_to_error::deserialize::<_, PowerFamily>(section) {
        Err(e) if e.path().to_string() != "." => Some(format!("{path}.{}", e.path())),
        _ => None,
    }
}
