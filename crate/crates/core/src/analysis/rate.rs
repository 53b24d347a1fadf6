use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::trace::RunTrace;

/// Gaps below this are clipped before taking logs.
pub const GAP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log-space residuals.
    pub residual: f64,
    pub clipped: bool,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares fit of `log y = intercept + slope·log k`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::Analysis("power-law fit needs at least two points".into()));
    }
    let mut clipped = false;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(k, y)| {
            if !(y >= GAP_FLOOR) {
                clipped = true;
            }
            (k.ln(), y.max(GAP_FLOOR).ln())
        })
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Analysis("power-law fit needs distinct k values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerLawFit {
        slope,
        intercept,
        residual,
        clipped,
        points: points.to_vec(),
    })
}

/// Decade sample points `10^2, 10^3, …` not exceeding `k_max`.
pub fn decades(k_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 100;
    while k <= k_max {
        out.push(k);
        k *= 10;
    }
    out
}

/// Log-log slope of the ergodic gap sampled at `10^2, 10^3, …`.
pub fn rate_slope(trace: &RunTrace) -> Result<PowerLawFit> {
    let ks = decades(trace.len());
    if ks.len() < 3 {
        return Err(Error::Analysis(format!(
            "rate fit needs at least three decades from 10^2, trace has {} iterations",
            trace.len()
        )));
    }
    let points: Vec<(f64, f64)> = ks.iter().map(|&k| (k as f64, trace.state(k).ergodic_gap)).collect();
    fit_power_law(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_inverse_sqrt() {
        let pts: Vec<(f64, f64)> = decades(100_000).iter().map(|&k| (k as f64, (k as f64).powf(-0.5))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-6);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn planted_constant() {
        let pts: Vec<(f64, f64)> = decades(10_000).iter().map(|&k| (k as f64, 0.3)).collect();
        assert!(fit_power_law(&pts).unwrap().slope.abs() < 1e-6);
    }

    #[test]
    fn zero_gap_is_clipped() {
        let fit = fit_power_law(&[(100.0, 1.0), (1000.0, 0.0), (10000.0, 0.1)]).unwrap();
        assert!(fit.clipped);
        assert!(fit.slope.is_finite());
    }

    #[test]
    fn decade_points() {
        assert_eq!(decades(99), Vec::<usize>::new());
        assert_eq!(decades(100_000), vec![100, 1000, 10_000, 100_000]);
    }
}
