use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{Instance, SaddlePoint};

use super::constants::{NoiseBounds, TheoryConstants};
use super::convergence::{budget_constant, convergence_time, GapMetric};
use super::lyapunov::{annotate_lyapunov, lyapunov_descent_check, DescentReport};
use super::rate::{rate_slope, PowerLawFit};
use super::series::{error_series_check, SeriesReport};
use super::trace::RunTrace;

/// Ergodic rate band accepted by the slope check.
pub const SLOPE_BAND: (f64, f64) = (-0.7, -0.35);

/// Final-state summary written next to every trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub preset: String,
    pub seed: u64,
    pub iterations: usize,
    pub lambda_max: f64,
    pub final_cost: f64,
    pub final_gap: f64,
    pub final_violation: f64,
    pub final_ergodic_gap: f64,
    pub final_ergodic_violation: f64,
    pub gap_threshold: f64,
    pub violation_threshold: f64,
    pub convergence_metric: GapMetric,
    pub k_star: Option<u64>,
    pub messages_sent: u64,
    pub messages_dropped: u64,
    pub messages_delivered: u64,
    pub optimal_value: Option<f64>,
    pub config: serde_json::Value,
}

impl RunSummary {
    #[allow(clippy::too_many_arguments)]
    pub fn from_trace(
        trace: &RunTrace,
        preset: &str,
        seed: u64,
        thresholds: (f64, f64),
        metric: GapMetric,
        optimal_value: Option<f64>,
        config: serde_json::Value,
    ) -> Self {
        let last = trace.last();
        Self {
            algorithm: trace.algorithm.clone(),
            preset: preset.to_string(),
            seed,
            iterations: trace.len(),
            lambda_max: trace.lambda_max,
            final_cost: last.cost,
            final_gap: last.gap,
            final_violation: last.violation,
            final_ergodic_gap: last.ergodic_gap,
            final_ergodic_violation: last.ergodic_violation,
            gap_threshold: thresholds.0,
            violation_threshold: thresholds.1,
            convergence_metric: metric,
            k_star: convergence_time(trace, thresholds.0, thresholds.1, metric),
            messages_sent: trace.total_sent(),
            messages_dropped: trace.total_dropped(),
            messages_delivered: trace.total_delivered(),
            optimal_value,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything `verify` computes for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub constants: TheoryConstants,
    pub saddle: SaddlePoint,
    pub k_star: Option<u64>,
    pub descent: DescentReport,
    pub series: Option<SeriesReport>,
    pub rate: Option<PowerLawFit>,
    pub budget_constant: Option<f64>,
    pub checks: Vec<CheckOutcome>,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Annotates `trace` in place and runs the descent, series, and rate checks.
///
/// Constants are computed along the trace, so they hold for unboxed
/// coordinates and for prices that left `[0, Λ_max]`.
pub fn analyse(
    instance: &Instance,
    trace: &mut RunTrace,
    noise: NoiseBounds,
    thresholds: (f64, f64),
    metric: GapMetric,
) -> Result<AnalysisReport> {
    let form = instance.to_form();
    let saddle = instance.oracle()?;
    let constants = TheoryConstants::for_trace(&form, &saddle, trace, trace.lambda_max, noise)?;
    annotate_lyapunov(trace, &form, &saddle, &constants)?;
    let descent = lyapunov_descent_check(trace)?;
    let mut checks = vec![CheckOutcome {
        name: "lyapunov_descent".into(),
        passed: descent.passed(),
        detail: format!(
            "{} transitions, {} violations, {} supermartingale violations, worst margin {:e}{}",
            descent.checked,
            descent.violations.len(),
            descent.supermartingale_violations,
            descent.worst_margin,
            if descent.steps_matched { "" } else { " (unequal primal/dual steps)" }
        ),
    }];
    let series = if trace.len() >= 2 {
        Some(error_series_check(trace, constants.g * constants.u, constants.d * constants.dual_radius)?)
    } else {
        None
    };
    match &series {
        Some(s) => checks.push(CheckOutcome {
            name: "error_series".into(),
            passed: s.summable,
            detail: format!(
                "sum at K={} is {:.6e}, at K/2 {:.6e}, tail fraction {:.4}{}",
                s.k,
                s.partial_sum,
                s.half_sum,
                s.tail_fraction,
                if s.constant_steps { " (constant steps: non-summable)" } else { "" }
            ),
        }),
        None => checks.push(CheckOutcome {
            name: "error_series".into(),
            passed: false,
            detail: "trace too short".into(),
        }),
    }
    let rate = rate_slope(trace);
    match &rate {
        Ok(fit) => checks.push(CheckOutcome {
            name: "rate_slope".into(),
            passed: (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&fit.slope),
            detail: format!(
                "slope {:.4} (band [{}, {}]), rms residual {:.3e}{}",
                fit.slope,
                SLOPE_BAND.0,
                SLOPE_BAND.1,
                fit.residual,
                if fit.clipped { ", gaps clipped" } else { "" }
            ),
        }),
        Err(e) => checks.push(CheckOutcome {
            name: "rate_slope".into(),
            passed: false,
            detail: e.to_string(),
        }),
    }
    let v0 = trace.initial.lyapunov.map(|l| l.v);
    let budget = match (v0, &series) {
        (Some(v0), Some(s)) => Some(budget_constant(&constants, v0, s.delay_constant)),
        _ => None,
    };
    Ok(AnalysisReport {
        k_star: convergence_time(trace, thresholds.0, thresholds.1, metric),
        constants,
        saddle,
        descent,
        series,
        rate: rate.ok(),
        budget_constant: budget,
        checks,
    })
}
