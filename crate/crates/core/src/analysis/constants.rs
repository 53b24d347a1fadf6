use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Error, Result};
use crate::problem::{PrimalDualForm, SaddlePoint, Sense};

use super::trace::RunTrace;

/// Explicit constants for the descent inequality.
///
/// With `g_j = f_j'(x_j) + (Aᵀλ̃)_j` and `r_r = (A x̃)_r − b_r`:
///
/// * `G ≥ ‖g‖` and `G ≥ √Σ_j (Σ_r |a_rj| D_r)²` (coupling through stale prices),
/// * `D ≥ ‖r‖` and `D ≥ √Σ_r (Σ_j |a_rj| G_j)²` (coupling through stale flows),
/// * `U ≥ ‖x − x*‖`, `dual_radius ≥ ‖λ − λ*‖`,
///
/// where `G_j` and `D_r` are per-coordinate bounds over the primal box and the
/// dual range `[lo, Λ_max]` (`lo = 0` for inequality rows, `−Λ_max` otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub lambda_max: f64,
    pub dual_radius: f64,
    pub per_edge_gradient: Vec<f64>,
    pub per_row_residual: Vec<f64>,
}

/// Noise amplitudes folded into the gradient and residual bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoiseBounds {
    pub cost: f64,
    pub demand: f64,
}

impl TheoryConstants {
    /// Constants over the full primal box. Fails for unboxed coordinates.
    pub fn compute(form: &PrimalDualForm, saddle: &SaddlePoint, lambda_max: f64, noise: NoiseBounds) -> Result<Self> {
        if !form.is_bounded() {
            return Err(Error::Analysis("primal box is unbounded; use TheoryConstants::for_trace".into()));
        }
        let boxes: Vec<(f64, f64)> = form.columns.iter().map(|c| (c.lower, c.upper)).collect();
        Self::from_boxes(form, saddle, &boxes, lambda_max, noise)
    }

    /// Constants valid along `trace`: unbounded box sides are replaced by the
    /// hull of the visited iterates and `x*`, and `Λ_max` is widened to cover
    /// every visited `|λ|`.
    pub fn for_trace(
        form: &PrimalDualForm,
        saddle: &SaddlePoint,
        trace: &RunTrace,
        lambda_max: f64,
        noise: NoiseBounds,
    ) -> Result<Self> {
        if trace.num_primal() != form.num_primal() || trace.num_dual() != form.num_dual() {
            return Err(Error::Analysis("trace and problem dimensions differ".into()));
        }
        let mut hull: Vec<(f64, f64)> = saddle.x.iter().map(|&v| (v, v)).collect();
        let mut lam = lambda_max;
        for rec in std::iter::once(&trace.initial).chain(&trace.records) {
            for (h, &v) in hull.iter_mut().zip(&rec.x) {
                h.0 = h.0.min(v);
                h.1 = h.1.max(v);
            }
            lam = rec.lambda.iter().fold(lam, |m, l| m.max(l.abs()));
        }
        lam = saddle.lambda.iter().fold(lam, |m, l| m.max(l.abs()));
        let boxes: Vec<(f64, f64)> = form
            .columns
            .iter()
            .zip(&hull)
            .map(|(c, h)| {
                let lo = if c.lower.is_finite() { c.lower } else { h.0 };
                let hi = if c.upper.is_finite() { c.upper } else { h.1 };
                (lo, hi)
            })
            .collect();
        Self::from_boxes(form, saddle, &boxes, lam, noise)
    }

    fn from_boxes(
        form: &PrimalDualForm,
        saddle: &SaddlePoint,
        boxes: &[(f64, f64)],
        lambda_max: f64,
        noise: NoiseBounds,
    ) -> Result<Self> {
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(invalid_param("lambda_max", format!("must be positive, got {lambda_max}")));
        }
        let lam_lo = match form.sense {
            Sense::Inequality => 0.0,
            Sense::Equality => -lambda_max,
        };
        let per_edge: Vec<f64> = form
            .columns
            .iter()
            .zip(boxes)
            .map(|(col, &(lo, hi))| {
                let (g0, g1) = (col.cost.gradient(lo), col.cost.gradient(hi));
                let (mut min, mut max) = (g0.min(g1), g0.max(g1));
                for &(_, a) in &col.rows {
                    let (p, q) = (a * lam_lo, a * lambda_max);
                    min += p.min(q);
                    max += p.max(q);
                }
                min.abs().max(max.abs()) + noise.cost
            })
            .collect();
        let per_row: Vec<f64> = form
            .rows
            .iter()
            .map(|row| {
                let (mut min, mut max) = (-row.rhs, -row.rhs);
                for &(j, a) in &row.entries {
                    let (p, q) = (a * boxes[j].0, a * boxes[j].1);
                    min += p.min(q);
                    max += p.max(q);
                }
                min.abs().max(max.abs()) + noise.demand
            })
            .collect();
        let g_grad = per_edge.iter().map(|g| g * g).sum::<f64>().sqrt();
        let d_resid = per_row.iter().map(|d| d * d).sum::<f64>().sqrt();
        let g_cpl = form
            .columns
            .iter()
            .map(|col| col.rows.iter().map(|&(r, a)| a.abs() * per_row[r]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt();
        let d_cpl = form
            .rows
            .iter()
            .map(|row| row.entries.iter().map(|&(j, a)| a.abs() * per_edge[j]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt();
        let width = boxes
            .iter()
            .zip(&saddle.x)
            .map(|(&(lo, hi), &xs)| (hi - xs).max(xs - lo).max(hi - lo))
            .fold(0.0_f64, f64::max);
        let n = form.num_primal() as f64;
        let m = form.num_dual() as f64;
        let spread = match form.sense {
            Sense::Inequality => 1.0,
            Sense::Equality => 2.0,
        };
        Ok(Self {
            g: g_grad.max(g_cpl),
            d: d_resid.max(d_cpl),
            u: n.sqrt() * width,
            lambda_max,
            dual_radius: spread * m.sqrt() * lambda_max,
            per_edge_gradient: per_edge,
            per_row_residual: per_row,
        })
    }
}
