//! One-call run of any algorithm from a config, as used by the CLI.

use std::path::Path;

use crate::analysis::{RunSummary, RunTrace};
use crate::baselines::{run_baseline, BaselineKind};
use crate::error::Result;
use crate::problem::Instance;
use crate::simnet::{resolve_lambda_max, run_simulation, SimConfig};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub instance: Instance,
    pub trace: RunTrace,
    pub summary: RunSummary,
}

/// Resolves the problem (relative paths against `base`) and runs.
pub fn run_config(config: &SimConfig, base: Option<&Path>) -> Result<RunOutcome> {
    config.validate()?;
    let instance = config.problem.resolve(base, config.seed)?;
    run_on(config, instance)
}

/// Runs the configured algorithm on `instance`.
pub fn run_on(config: &SimConfig, instance: Instance) -> Result<RunOutcome> {
    let (lambda_max, saddle) = resolve_lambda_max(config, &instance)?;
    let trace = match BaselineKind::from_config(config) {
        None => run_simulation(config, &instance)?.trace,
        Some(kind) => run_baseline(kind, config, &instance, lambda_max)?,
    };
    let summary = RunSummary::from_trace(
        &trace,
        config.preset.as_str(),
        config.seed,
        (config.metrics.gap_threshold, config.metrics.violation_threshold),
        config.metrics.metric,
        saddle.map(|s| s.optimal_value),
        serde_json::to_value(config)?,
    );
    Ok(RunOutcome { instance, trace, summary })
}
