use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};

use super::constants::TheoryConstants;
use super::trace::RunTrace;

/// Which iterate the thresholds are applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMetric {
    /// `(x^k, λ^k)` itself.
    #[default]
    Iterate,
    /// The running averages `(x̄^k, λ̄^k)`.
    Ergodic,
}

/// Smallest `k ≥ 1` with gap and violation strictly below their thresholds.
pub fn convergence_time(trace: &RunTrace, gap_thresh: f64, viol_thresh: f64, metric: GapMetric) -> Option<u64> {
    trace
        .records
        .iter()
        .find(|r| {
            let (g, v) = match metric {
                GapMetric::Iterate => (r.gap, r.violation),
                GapMetric::Ergodic => (r.ergodic_gap, r.ergodic_violation),
            };
            g < gap_thresh && v < viol_thresh
        })
        .map(|r| r.k)
}

/// `C = V⁰ + G² + D² + C̃`.
pub fn budget_constant(constants: &TheoryConstants, v0: f64, delay_constant: f64) -> f64 {
    v0 + constants.g * constants.g + constants.d * constants.d + delay_constant
}

/// `⌈(C/ε)²⌉`.
pub fn iteration_budget_for(epsilon: f64, c: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(invalid_param("epsilon", format!("must be positive, got {epsilon}")));
    }
    Ok(((c / epsilon).powi(2)).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::trace::TraceRecord;

    fn trace(gaps: &[f64]) -> RunTrace {
        let initial = TraceRecord::initial(vec![0.0], vec![0.0], 0.0, 9.0, 9.0);
        let records = gaps
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let mut r = initial.clone();
                r.k = i as u64 + 1;
                r.gap = g;
                r.violation = g / 2.0;
                r
            })
            .collect();
        RunTrace { algorithm: "t".into(), lambda_max: 1.0, initial, records }
    }

    #[test]
    fn first_hit() {
        let t = trace(&[1.0, 0.5, 0.09, 0.2, 0.01]);
        assert_eq!(convergence_time(&t, 0.1, 0.05, GapMetric::Iterate), Some(3));
        assert_eq!(convergence_time(&t, f64::INFINITY, f64::INFINITY, GapMetric::Iterate), Some(1));
        assert_eq!(convergence_time(&t, 0.001, 0.05, GapMetric::Iterate), None);
        assert_eq!(convergence_time(&trace(&[]), f64::INFINITY, f64::INFINITY, GapMetric::Iterate), None);
    }

    #[test]
    fn budget_formula() {
        assert_eq!(iteration_budget_for(1.0, 10.0).unwrap(), 100);
        assert_eq!(iteration_budget_for(0.5, 10.0).unwrap(), 400);
        assert!(iteration_budget_for(0.0, 10.0).is_err());
        assert!(iteration_budget_for(-1.0, 10.0).is_err());
    }
}
