use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::trace::RunTrace;

/// Tail increment below which a series is reported summable.
pub const SUMMABLE_TAIL_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub k: usize,
    /// `Σ_{k<K} E_k`.
    pub partial_sum: f64,
    /// `Σ_{k<K/2} E_k`.
    pub half_sum: f64,
    /// `(partial_sum − half_sum) / partial_sum`.
    pub tail_fraction: f64,
    pub summable: bool,
    /// Whether every recorded step was equal (a constant schedule).
    pub constant_steps: bool,
    /// `S_k·√(k+1)` at `k = K/2` and `k = K − 1`.
    pub s_scaled_half: f64,
    pub s_scaled_end: f64,
    pub s_scaled_decreasing: bool,
    /// `Σ_{k<K} (2GUα_kS_k + 2DR_λβ_kT_k)`, the delay part of the series.
    pub delay_constant: f64,
}

/// Partial-sum summary of the error series written by
/// [`annotate_lyapunov`](super::annotate_lyapunov).
///
/// `g_u` is `G·U` and `d_r` is `D·R_λ`, used to split off the delay part.
pub fn error_series_check(trace: &RunTrace, g_u: f64, d_r: f64) -> Result<SeriesReport> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::Analysis("error series needs at least two transitions".into()));
    }
    let mut e = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut delay = 0.0;
    for k in 0..n {
        let ly = trace
            .state(k)
            .lyapunov
            .ok_or_else(|| Error::Analysis(format!("state {k} has no Lyapunov terms")))?;
        let (ek, sk, tk) = match (ly.e, ly.s, ly.t) {
            (Some(e), Some(s), Some(t)) => (e, s, t),
            _ => return Err(Error::Analysis(format!("transition {k} has no error terms"))),
        };
        let rec = &trace.records[k];
        e.push(ek);
        s.push(sk);
        delay += 2.0 * g_u * rec.alpha * sk + 2.0 * d_r * rec.beta * tk;
    }
    let partial_sum: f64 = e.iter().sum();
    let half_sum: f64 = e[..n / 2].iter().sum();
    let tail_fraction = if partial_sum > 0.0 { (partial_sum - half_sum) / partial_sum } else { 0.0 };
    let first = (trace.records[0].alpha, trace.records[0].beta);
    let constant_steps = trace.records.iter().all(|r| (r.alpha, r.beta) == first);
    let scaled = |k: usize| s[k] * ((k + 1) as f64).sqrt();
    let (half, end) = (scaled(n / 2), scaled(n - 1));
    Ok(SeriesReport {
        k: n,
        partial_sum,
        half_sum,
        tail_fraction,
        summable: !constant_steps && tail_fraction < SUMMABLE_TAIL_FRACTION,
        constant_steps,
        s_scaled_half: half,
        s_scaled_end: end,
        s_scaled_decreasing: end <= half,
        delay_constant: delay,
    })
}
