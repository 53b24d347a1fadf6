use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{PrimalDualForm, SaddlePoint};

use super::constants::TheoryConstants;
use super::trace::{LyapunovTerms, RunTrace};

/// Absolute slack on every inequality check.
pub const DESCENT_TOLERANCE: f64 = 1e-9;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// `Σ_{s=k−a}^{k−1} steps[s]`, where `steps[s]` is the step used by the
/// update out of state `s`.
fn window(steps: &[f64], k: usize, age: u64) -> f64 {
    let start = k.saturating_sub(age as usize);
    steps[start..k].iter().sum()
}

/// Fills the Lyapunov columns of every state.
///
/// State `k` gets `V^k`, `Δ_k^x`, `Δ_k^λ`; every state but the last also gets
/// `S_k`, `T_k`, `E_k` for the transition `k → k+1`, using the realised ages
/// and steps of that transition.
pub fn annotate_lyapunov(trace: &mut RunTrace, form: &PrimalDualForm, saddle: &SaddlePoint, c: &TheoryConstants) -> Result<()> {
    if saddle.x.len() != trace.num_primal() || saddle.lambda.len() != trace.num_dual() {
        return Err(Error::Analysis("saddle point does not match the trace dimensions".into()));
    }
    let l_star = form.lagrangian(&saddle.x, &saddle.lambda);
    let alphas: Vec<f64> = trace.records.iter().map(|r| r.alpha).collect();
    let betas: Vec<f64> = trace.records.iter().map(|r| r.beta).collect();
    let transitions: Vec<(u64, u64)> = trace.records.iter().map(|r| (r.delta_max, r.big_delta_max)).collect();
    let total = trace.records.len();
    for k in 0..=total {
        let rec = if k == 0 { &mut trace.initial } else { &mut trace.records[k - 1] };
        let v = sq_dist(&rec.x, &saddle.x) + sq_dist(&rec.lambda, &saddle.lambda);
        let dx = form.lagrangian(&rec.x, &saddle.lambda) - l_star;
        let dlam = l_star - form.lagrangian(&saddle.x, &rec.lambda);
        let (s, t, e) = if k < total {
            let (a, b) = (alphas[k], betas[k]);
            let (delta, big_delta) = transitions[k];
            let s = window(&betas, k, delta);
            let t = window(&alphas, k, big_delta);
            let e = a * a * c.g * c.g + b * b * c.d * c.d + 2.0 * c.g * c.u * a * s + 2.0 * c.d * c.dual_radius * b * t;
            (Some(s), Some(t), Some(e))
        } else {
            (None, None, None)
        };
        rec.lyapunov = Some(LyapunovTerms { v, dx, dlam, s, t, e });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentViolation {
    pub k: u64,
    /// `V^{k+1} − V^k`.
    pub lhs: f64,
    /// `−2α_kΔ_k^x − 2β_kΔ_k^λ + E_k`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentReport {
    pub checked: usize,
    pub violations: Vec<DescentViolation>,
    /// Largest `lhs − rhs` seen.
    pub worst_margin: f64,
    /// Transitions where the supermartingale sequence rose by more than the
    /// tolerance.
    pub supermartingale_violations: usize,
    /// The bound assumes equal primal and dual steps.
    pub steps_matched: bool,
}

impl DescentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.supermartingale_violations == 0
    }
}

/// Checks `V^{k+1} − V^k ≤ −2α_kΔ_k^x − 2β_kΔ_k^λ + E_k + tol` for every
/// transition, and that `W_k = V^k + Σ_{s<k}(2α_sΔ_s^x + 2β_sΔ_s^λ − E_s)`
/// never rises by more than `tol`.
///
/// Requires [`annotate_lyapunov`] to have run.
pub fn lyapunov_descent_check(trace: &RunTrace) -> Result<DescentReport> {
    let states: Vec<LyapunovTerms> = std::iter::once(&trace.initial)
        .chain(&trace.records)
        .map(|r| r.lyapunov.ok_or_else(|| Error::Analysis(format!("state {} has no Lyapunov terms", r.k))))
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut running = 0.0;
    let mut w_prev = states[0].v;
    let mut sm = 0;
    let mut matched = true;
    for (k, rec) in trace.records.iter().enumerate() {
        let (now, next) = (&states[k], &states[k + 1]);
        let e = now.e.ok_or_else(|| Error::Analysis(format!("transition {k} has no E_k")))?;
        matched &= rec.alpha == rec.beta;
        let u = 2.0 * rec.alpha * now.dx + 2.0 * rec.beta * now.dlam;
        let lhs = next.v - now.v;
        let rhs = -u + e;
        worst = worst.max(lhs - rhs);
        if lhs > rhs + DESCENT_TOLERANCE {
            violations.push(DescentViolation { k: k as u64, lhs, rhs });
        }
        running += u - e;
        let w = next.v + running;
        if w > w_prev + DESCENT_TOLERANCE {
            sm += 1;
        }
        w_prev = w;
    }
    Ok(DescentReport {
        checked: trace.records.len(),
        violations,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        supermartingale_violations: sm,
        steps_matched: matched,
    })
}
