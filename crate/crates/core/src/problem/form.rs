//! Canonical saddle-point form shared by the agents, the simulator, the
//! baselines, and the metrics.
//!
//! Every instance is lowered to
//!
//! ```text
//! L(x, λ) = Σ_j f_j(x_j) + Σ_r λ_r (a_rᵀ x − b_r),   x_j ∈ [lo_j, hi_j]
//! ```
//!
//! with `λ ≥ 0` for inequality rows (`a_rᵀ x ≤ b_r`) and `λ` free for
//! equality rows. A supply-chain retailer row is `−h_i(x) ≤ −d_i`, so its
//! multiplier term is exactly `λ_i (d_i − h_i(x))`.

use serde::{Deserialize, Serialize};

use super::cost::CostFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// `a_rᵀ x ≤ b_r`, multiplier projected onto `λ ≥ 0`.
    Inequality,
    /// `a_rᵀ x = b_r`, multiplier unconstrained.
    Equality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub cost: CostFunction,
    pub lower: f64,
    pub upper: f64,
    /// `(row, coefficient)` pairs, ascending by row.
    pub rows: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// `(column, coefficient)` pairs, ascending by column.
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualForm {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub sense: Sense,
}

impl PrimalDualForm {
    pub(crate) fn from_parts(columns: Vec<(CostFunction, f64, f64)>, rows: Vec<Row>, sense: Sense) -> Self {
        let mut cols: Vec<Column> = columns
            .into_iter()
            .map(|(cost, lower, upper)| Column {
                cost,
                lower,
                upper,
                rows: Vec::new(),
            })
            .collect();
        for (r, row) in rows.iter().enumerate() {
            for &(j, a) in &row.entries {
                cols[j].rows.push((r, a));
            }
        }
        Self {
            columns: cols,
            rows,
            sense,
        }
    }

    pub fn num_primal(&self) -> usize {
        self.columns.len()
    }

    pub fn num_dual(&self) -> usize {
        self.rows.len()
    }

    pub fn project_primal(&self, j: usize, v: f64) -> f64 {
        let c = &self.columns[j];
        v.clamp(c.lower, c.upper)
    }

    pub fn project_dual(&self, v: f64) -> f64 {
        match self.sense {
            Sense::Inequality => v.max(0.0),
            Sense::Equality => v,
        }
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, &v)| c.cost.value(v)).sum()
    }

    /// `a_rᵀ x − b_r`, summed in column order.
    pub fn row_residual(&self, r: usize, x: &[f64]) -> f64 {
        let row = &self.rows[r];
        let mut s = 0.0;
        for &(j, a) in &row.entries {
            s += a * x[j];
        }
        s - row.rhs
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.row_residual(r, x)).collect()
    }

    pub fn lagrangian(&self, x: &[f64], lambda: &[f64]) -> f64 {
        let coupling: f64 = (0..self.rows.len())
            .map(|r| lambda[r] * self.row_residual(r, x))
            .sum();
        self.cost(x) + coupling
    }

    /// `(Aᵀλ)_j`, summed in row order.
    pub fn dual_slope(&self, j: usize, lambda: &[f64]) -> f64 {
        let mut s = 0.0;
        for &(r, a) in &self.columns[j].rows {
            s += a * lambda[r];
        }
        s
    }

    /// Euclidean norm of the violated part of the constraints.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let sq: f64 = (0..self.rows.len())
            .map(|r| {
                let v = self.row_residual(r, x);
                match self.sense {
                    Sense::Inequality => v.max(0.0).powi(2),
                    Sense::Equality => v * v,
                }
            })
            .sum();
        sq.sqrt()
    }

    pub fn is_bounded(&self) -> bool {
        self.columns.iter().all(|c| c.lower.is_finite() && c.upper.is_finite())
    }
}
