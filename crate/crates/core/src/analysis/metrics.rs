use crate::error::{invalid_param, Error, Result};
use crate::linalg::norm2;
use crate::problem::{Instance, PrimalDualForm, SaddlePoint, Sense};

use super::trace::{RunTrace, TraceRecord};

/// `max_{λ ∈ Λ-box} L(x̄, λ) − min_{x ∈ X} L(x, λ̄)`.
///
/// Inequality rows use the box `[0, Λ_max]` per coordinate, equality rows the
/// Euclidean ball of radius `Λ_max`. Both extremes are closed-form: the max
/// puts `Λ_max` on every violated row (or along the residual direction), the
/// min separates over coordinates.
pub fn duality_gap(instance: &Instance, x_bar: &[f64], lambda_bar: &[f64], lambda_max: f64) -> Result<f64> {
    let form = instance.to_form();
    check_dims(&form, x_bar, lambda_bar)?;
    if !(lambda_max >= 0.0) {
        return Err(invalid_param("lambda_max", format!("must be non-negative, got {lambda_max}")));
    }
    Ok(gap_form(&form, x_bar, lambda_bar, lambda_max))
}

pub(crate) fn check_dims(form: &PrimalDualForm, x: &[f64], lambda: &[f64]) -> Result<()> {
    if x.len() != form.num_primal() {
        return Err(Error::DimensionMismatch {
            what: "primal vector",
            expected: form.num_primal(),
            got: x.len(),
        });
    }
    if lambda.len() != form.num_dual() {
        return Err(Error::DimensionMismatch {
            what: "dual vector",
            expected: form.num_dual(),
            got: lambda.len(),
        });
    }
    Ok(())
}

pub fn gap_form(form: &PrimalDualForm, x_bar: &[f64], lambda_bar: &[f64], lambda_max: f64) -> f64 {
    max_part(form, x_bar, lambda_max) - min_part(form, lambda_bar)
}

/// `max_λ L(x̄, λ)` over the bounded dual set.
pub fn max_part(form: &PrimalDualForm, x_bar: &[f64], lambda_max: f64) -> f64 {
    let residuals = form.residuals(x_bar);
    let coupling = match form.sense {
        Sense::Inequality => lambda_max * residuals.iter().map(|r| r.max(0.0)).sum::<f64>(),
        Sense::Equality => lambda_max * norm2(&residuals),
    };
    form.cost(x_bar) + coupling
}

/// `min_{x ∈ X} L(x, λ̄)`, separable per coordinate.
pub fn min_part(form: &PrimalDualForm, lambda_bar: &[f64]) -> f64 {
    let primal: f64 = form
        .columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let slope = form.dual_slope(j, lambda_bar);
            let x = col.cost.argmin_with_slope(slope, col.lower, col.upper);
            if x == 0.0 {
                0.0
            } else {
                col.cost.value(x) + slope * x
            }
        })
        .sum();
    let offset: f64 = form.rows.iter().zip(lambda_bar).map(|(row, l)| l * row.rhs).sum();
    primal - offset
}

/// Euclidean norm of the violated part of the constraints. Oversupply at a
/// retailer is feasible and contributes nothing.
pub fn constraint_violation(instance: &Instance, x: &[f64]) -> Result<f64> {
    let form = instance.to_form();
    if x.len() != form.num_primal() {
        return Err(Error::DimensionMismatch {
            what: "primal vector",
            expected: form.num_primal(),
            got: x.len(),
        });
    }
    Ok(form.violation(x))
}

/// Coordinate-wise means of states `1..=k`.
pub fn ergodic_average(trace: &RunTrace, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(invalid_param("K", "ergodic average needs K >= 1"));
    }
    if trace.len() < k {
        return Err(Error::Trace(format!("trace has {} records, need {k}", trace.len())));
    }
    let mut x = vec![0.0; trace.num_primal()];
    let mut l = vec![0.0; trace.num_dual()];
    for rec in &trace.records[..k] {
        add(&mut x, &rec.x);
        add(&mut l, &rec.lambda);
    }
    let inv = k as f64;
    x.iter_mut().for_each(|v| *v /= inv);
    l.iter_mut().for_each(|v| *v /= inv);
    Ok((x, l))
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// Default dual box radius: `2·max(1, max_i |λ*_i|)` for inequality rows,
/// `2·max(1, ‖λ*‖₂)` for the equality ball.
pub fn default_lambda_max(form: &PrimalDualForm, saddle: &SaddlePoint) -> f64 {
    let scale = match form.sense {
        Sense::Inequality => saddle.lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs())),
        Sense::Equality => norm2(&saddle.lambda),
    };
    2.0 * scale.max(1.0)
}

/// Accumulates per-tick records with running ergodic sums.
#[derive(Debug, Clone)]
pub struct TraceBuilder {
    algorithm: String,
    lambda_max: f64,
    sum_x: Vec<f64>,
    sum_l: Vec<f64>,
    initial: TraceRecord,
    records: Vec<TraceRecord>,
}

/// Per-tick bookkeeping supplied by the driver.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TickStats {
    pub alpha: f64,
    pub beta: f64,
    pub delta_max: u64,
    pub big_delta_max: u64,
    pub sent: u64,
    pub dropped: u64,
    pub delivered: u64,
}

impl TraceBuilder {
    pub fn new(algorithm: &str, form: &PrimalDualForm, lambda_max: f64, x0: &[f64], lambda0: &[f64]) -> Self {
        let initial = TraceRecord::initial(
            x0.to_vec(),
            lambda0.to_vec(),
            form.cost(x0),
            gap_form(form, x0, lambda0, lambda_max),
            form.violation(x0),
        );
        Self {
            algorithm: algorithm.to_string(),
            lambda_max,
            sum_x: vec![0.0; x0.len()],
            sum_l: vec![0.0; lambda0.len()],
            initial,
            records: Vec::new(),
        }
    }

    pub fn with_capacity(mut self, k: usize) -> Self {
        self.records.reserve(k);
        self
    }

    /// Records state `k` measured against `form` (the parameters in force at
    /// that tick).
    pub fn push(&mut self, form: &PrimalDualForm, stats: TickStats, x: &[f64], lambda: &[f64]) {
        add(&mut self.sum_x, x);
        add(&mut self.sum_l, lambda);
        let k = self.records.len() as u64 + 1;
        let n = k as f64;
        let xb: Vec<f64> = self.sum_x.iter().map(|v| v / n).collect();
        let lb: Vec<f64> = self.sum_l.iter().map(|v| v / n).collect();
        self.records.push(TraceRecord {
            k,
            alpha: stats.alpha,
            beta: stats.beta,
            delta_max: stats.delta_max,
            big_delta_max: stats.big_delta_max,
            sent: stats.sent,
            dropped: stats.dropped,
            delivered: stats.delivered,
            cost: form.cost(x),
            gap: gap_form(form, x, lambda, self.lambda_max),
            violation: form.violation(x),
            ergodic_gap: gap_form(form, &xb, &lb, self.lambda_max),
            ergodic_violation: form.violation(&xb),
            lyapunov: None,
            x: x.to_vec(),
            lambda: lambda.to_vec(),
        });
    }

    pub fn finish(self) -> RunTrace {
        RunTrace {
            algorithm: self.algorithm,
            lambda_max: self.lambda_max,
            initial: self.initial,
            records: self.records,
        }
    }
}
