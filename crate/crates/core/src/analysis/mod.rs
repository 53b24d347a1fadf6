//! Metrics and theory checks over run traces.

mod constants;
mod convergence;
mod lyapunov;
mod metrics;
mod rate;
mod report;
mod series;
mod trace;

pub use constants::{NoiseBounds, TheoryConstants};
pub use convergence::{budget_constant, convergence_time, iteration_budget_for, GapMetric};
pub use lyapunov::{annotate_lyapunov, lyapunov_descent_check, DescentReport, DescentViolation, DESCENT_TOLERANCE};
pub(crate) use metrics::check_dims;
pub use metrics::{
    constraint_violation, default_lambda_max, duality_gap, ergodic_average, gap_form, max_part, min_part,
    TickStats, TraceBuilder,
};
pub use rate::{decades, fit_power_law, rate_slope, PowerLawFit, GAP_FLOOR};
pub use report::{analyse, AnalysisReport, CheckOutcome, RunSummary, SLOPE_BAND};
pub use series::{error_series_check, SeriesReport, SUMMABLE_TAIL_FRACTION};
pub use trace::{LyapunovTerms, RunTrace, TraceRecord};
