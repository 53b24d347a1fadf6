use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};

/// Separable per-coordinate cost.
///
/// Serialises as a bare number for the linear case and as
/// `{"c": .., "d": ..}` for `½·c·x² + d·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostFunction {
    Linear(f64),
    Quadratic { c: f64, d: f64 },
}

impl CostFunction {
    pub fn quadratic(c: f64, d: f64) -> Result<Self> {
        let f = CostFunction::Quadratic { c, d };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CostFunction::Linear(c) if !c.is_finite() => {
                Err(invalid_param("cost", format!("non-finite linear cost {c}")))
            }
            CostFunction::Quadratic { c, d } if !(c > 0.0 && c.is_finite()) || !d.is_finite() => {
                Err(invalid_param("curvature", format!("quadratic curvature must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Linear(c) => c * x,
            CostFunction::Quadratic { c, d } => 0.5 * c * x * x + d * x,
        }
    }

    pub fn gradient(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Linear(c) => c,
            CostFunction::Quadratic { c, d } => c * x + d,
        }
    }

    /// Curvature (second derivative); zero for linear costs.
    pub fn curvature(&self) -> f64 {
        match *self {
            CostFunction::Linear(_) => 0.0,
            CostFunction::Quadratic { c, .. } => c,
        }
    }

    /// Adds `delta` to the linear coefficient.
    pub fn shifted(&self, delta: f64) -> Self {
        match *self {
            CostFunction::Linear(c) => CostFunction::Linear(c + delta),
            CostFunction::Quadratic { c, d } => CostFunction::Quadratic { c, d: d + delta },
        }
    }

    pub fn linear_coefficient(&self) -> f64 {
        match *self {
            CostFunction::Linear(c) => c,
            CostFunction::Quadratic { d, .. } => d,
        }
    }

    /// Minimiser of `f(x) + slope·x` over `[lower, upper]`. Linear ties go to
    /// the lower end.
    pub fn argmin_with_slope(&self, slope: f64, lower: f64, upper: f64) -> f64 {
        match *self {
            CostFunction::Linear(c) => {
                if c + slope < 0.0 {
                    upper
                } else {
                    lower
                }
            }
            CostFunction::Quadratic { c, d } => (-(d + slope) / c).clamp(lower, upper),
        }
    }
}
