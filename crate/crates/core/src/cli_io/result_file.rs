use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cli_io::SpecFile;
use crate::constants::ConstantsReport;
use crate::error::{Error, Result};
use crate::solver::SolveResult;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to replay the verdicts of one solve.
///
/// Carries no timestamp, so identical runs serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub lambda_log10: f64,
    /// False when the solver stopped early and `result` holds its best iterate.
    pub converged: bool,
    pub spec: SpecFile,
    pub constants: ConstantsReport,
    pub result: SolveResult,
}

impl ResultFile {
    pub fn new(
        spec: SpecFile,
        constants: ConstantsReport,
        result: SolveResult,
        converged: bool,
    ) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            seed: result.seed,
            lambda_log10: result.lambda_log10,
            converged,
            spec,
            constants,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse(format!("at key `{}`: {}", e.path(), e.inner())))
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        let json = self.to_json();
        match path {
            Some(p) => std::fs::write(p, json)?,
            None => std::io::stdout().lock().write_all(json.as_bytes())?,
        }
        Ok(())
    }
}
