use serde::{Deserialize, Serialize};

use crate::agents::StepSchedule;
use crate::error::{invalid_param, Result};
use crate::problem::Instance;

/// Additive offset applied to one parameter family as a function of the tick.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftSchedule {
    #[default]
    Constant,
    /// Linear interpolation between `(tick, offset)` knots, held flat outside.
    PiecewiseLinear { knots: Vec<(u64, f64)> },
    /// `amplitude / (k + 1)^exponent`.
    Decaying { amplitude: f64, exponent: f64 },
}

impl DriftSchedule {
    /// Offset of `total` reached linearly at tick `end`.
    pub fn ramp(end: u64, total: f64) -> Self {
        DriftSchedule::PiecewiseLinear {
            knots: vec![(0, 0.0), (end, total)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DriftSchedule::Constant => Ok(()),
            DriftSchedule::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return Err(invalid_param("drift.knots", "need at least one knot"));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(invalid_param("drift.knots", "ticks must be strictly increasing"));
                }
                if knots.iter().any(|k| !k.1.is_finite()) {
                    return Err(invalid_param("drift.knots", "offsets must be finite"));
                }
                Ok(())
            }
            DriftSchedule::Decaying { amplitude, exponent } => {
                if !amplitude.is_finite() || !(*exponent > 0.0) {
                    return Err(invalid_param("drift.exponent", "decay needs a finite amplitude and exponent > 0"));
                }
                Ok(())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DriftSchedule::Constant)
    }

    pub fn offset(&self, k: u64) -> f64 {
        match self {
            DriftSchedule::Constant => 0.0,
            DriftSchedule::PiecewiseLinear { knots } => {
                let first = knots[0];
                if k <= first.0 {
                    return first.1;
                }
                for w in knots.windows(2) {
                    let ((k0, v0), (k1, v1)) = (w[0], w[1]);
                    if k <= k1 {
                        let t = (k - k0) as f64 / (k1 - k0) as f64;
                        return v0 + t * (v1 - v0);
                    }
                }
                knots[knots.len() - 1].1
            }
            DriftSchedule::Decaying { amplitude, exponent } => amplitude / ((k + 1) as f64).powf(*exponent),
        }
    }
}

/// Drift of the three parameter families.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftModel {
    #[serde(default)]
    pub cost: DriftSchedule,
    #[serde(default)]
    pub demand: DriftSchedule,
    #[serde(default)]
    pub capacity: DriftSchedule,
}

impl DriftModel {
    pub fn validate(&self) -> Result<()> {
        self.cost.validate()?;
        self.demand.validate()?;
        self.capacity.validate()
    }

    pub fn is_constant(&self) -> bool {
        self.cost.is_constant() && self.demand.is_constant() && self.capacity.is_constant()
    }

    pub fn offsets(&self, k: u64) -> (f64, f64, f64) {
        (self.cost.offset(k), self.demand.offset(k), self.capacity.offset(k))
    }
}

/// Parameters in force at tick `k`. Fails if drift pushes a capacity or a
/// linear cost to zero or below.
pub fn apply_drift(base: &Instance, k: u64, drift: &DriftModel) -> Result<Instance> {
    let (c, d, u) = drift.offsets(k);
    base.shifted(c, d, u)
}

/// Running sums `Σ_{s≤k} step_s·|offset(s)|` for `k = 0..K`.
pub fn drift_partial_sums(schedule: &DriftSchedule, step: &StepSchedule, k_max: u64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..k_max)
        .map(|k| {
            acc += step.value(k) * schedule.offset(k).abs();
            acc
        })
        .collect()
}
