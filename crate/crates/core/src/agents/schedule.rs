use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};

/// Step-size rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepSchedule {
    /// `scale / (k + 1)^exponent`.
    Diminishing { scale: f64, exponent: f64 },
    Constant { value: f64 },
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::Diminishing {
            scale: 1.0,
            exponent: 0.5,
        }
    }
}

impl StepSchedule {
    pub fn constant(value: f64) -> Self {
        StepSchedule::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Diminishing { scale, exponent } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(invalid_param("step.scale", format!("must be positive, got {scale}")));
                }
                if !(exponent >= 0.0 && exponent.is_finite()) {
                    return Err(invalid_param("step.exponent", format!("must be non-negative, got {exponent}")));
                }
            }
            StepSchedule::Constant { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(invalid_param("step.value", format!("must be positive, got {value}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_diminishing(&self) -> bool {
        matches!(self, StepSchedule::Diminishing { exponent, .. } if *exponent > 0.0)
    }

    pub fn value(&self, k: u64) -> f64 {
        match *self {
            StepSchedule::Constant { value } => value,
            StepSchedule::Diminishing { scale, exponent } => {
                let n = (k + 1) as f64;
                // sqrt is correctly rounded everywhere; powf is not.
                if exponent == 0.5 {
                    scale / n.sqrt()
                } else {
                    scale / n.powf(exponent)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_diminishing_values() {
        let s = StepSchedule::default();
        assert_eq!(s.value(0), 1.0);
        assert_eq!(s.value(3), 0.5);
    }

    #[test]
    fn constant_is_constant() {
        let s = StepSchedule::constant(0.05);
        assert!((0..100).all(|k| s.value(k) == 0.05));
    }

    #[test]
    fn diminishing_is_non_increasing_and_positive() {
        let s = StepSchedule::Diminishing {
            scale: 2.0,
            exponent: 0.7,
        };
        let mut prev = f64::INFINITY;
        for k in 0..10_000 {
            let v = s.value(k);
            assert!(v > 0.0 && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn validation() {
        assert!(StepSchedule::constant(0.0).validate().is_err());
        assert!(StepSchedule::Diminishing { scale: 1.0, exponent: -1.0 }.validate().is_err());
    }
}
