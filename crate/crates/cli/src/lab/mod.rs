//! Scenario runner: validates a config, executes the named experiment, and
//! writes CSV tables, a JSON summary and a manifest.

mod artifact;
mod config;
mod scenarios;

use std::path::{Path, PathBuf};

use dnlab_core::audit::{AuditSession, AuditSummary};
use serde::Serialize;
use thiserror::Error;

pub use artifact::{config_hash, write_artifacts, Manifest, Table};
pub use config::{
    CascadeParams, ConvergenceParams, CounterexampleParams, DataSpec, EnvelopeParams, GridConfig, Resolved,
    RigidityParams, SaturationParams, ScenarioConfig, ScenarioName, ScenarioParams, SecondParams, Tolerances,
    ValidConfig, WellposednessParams,
};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] dnlab_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> LabError {
        LabError::Io { path: path.to_path_buf(), source }
    }

    /// Usage and configuration problems, as opposed to failed runs.
    pub fn is_usage(&self) -> bool {
        matches!(self, LabError::Config(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `measured <= bound`
    AtMost,
    /// `measured >= bound`
    AtLeast,
    /// a boolean property; `measured` is 1 or 0
    Holds,
}

/// Where the reference value of an assertion comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
    ExactIdentity,
    TwoGrid,
    Property,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub provenance: Provenance,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, provenance: Provenance) -> Assertion {
        Assertion {
            name: name.into(),
            passed: measured <= bound,
            measured,
            bound,
            comparison: Comparison::AtMost,
            provenance,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, provenance: Provenance) -> Assertion {
        Assertion {
            name: name.into(),
            passed: measured >= bound,
            measured,
            bound,
            comparison: Comparison::AtLeast,
            provenance,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool, provenance: Provenance) -> Assertion {
        Assertion {
            name: name.into(),
            passed: ok,
            measured: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            comparison: Comparison::Holds,
            provenance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: ScenarioName,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    /// Key numbers of the run, by name.
    pub metrics: serde_json::Map<String, serde_json::Value>,
    pub divergence_audit: AuditSummary,
}

impl Summary {
    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub summary: Summary,
    pub tables: Vec<Table>,
    pub manifest: Manifest,
    /// Directory the artifacts were written to, if any.
    pub output: Option<PathBuf>,
}

/// What a scenario hands back before the audit and artifact plumbing.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub assertions: Vec<Assertion>,
    pub metrics: serde_json::Map<String, serde_json::Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn metric(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metrics.insert(name.to_string(), v);
    }
}

/// Runs a validated config. Artifacts are written when the config names an
/// output directory.
pub fn run_scenario(valid: &ValidConfig) -> Result<RunArtifact, LabError> {
    let cfg = &valid.config;
    let tol = cfg.tolerances.resolve();
    let session = AuditSession::start();
    let mut outcome = scenarios::run(cfg, &valid.params, &tol)?;
    let audit = session.finish();
    outcome.assertions.push(Assertion::at_most(
        "divergence-audit",
        audit.worst_ratio,
        tol.divergence,
        Provenance::ExactIdentity,
    ));
    outcome.metric("audited_fields", audit.fields);
    let passed = outcome.assertions.iter().all(|a| a.passed);
    let summary = Summary {
        scenario: cfg.scenario,
        passed,
        assertions: outcome.assertions,
        metrics: outcome.metrics,
        divergence_audit: audit,
    };
    let manifest = Manifest::new(cfg, &outcome.tables)?;
    if let Some(dir) = &cfg.output {
        write_artifacts(dir, &summary, &outcome.tables, &manifest)?;
    }
    Ok(RunArtifact { summary, tables: outcome.tables, manifest, output: cfg.output.clone() })
}
