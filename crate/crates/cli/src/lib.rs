//! Scenario runner for the dnlab-core experiments.

pub mod lab;

pub use lab::{run_scenario, LabError, RunArtifact, ScenarioConfig, ScenarioName, Summary};
