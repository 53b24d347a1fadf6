use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};

use super::dag::Tier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawQuadratic {
    c: Vec<f64>,
    d: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tiers: Vec<Tier>,
}

/// Equality-constrained separable quadratic program
///
/// ```text
/// minimise  Σ_i ½·c_i·x_i² + d_i·x_i   subject to  A x = b
/// ```
///
/// with one scalar decision variable per agent. `tiers` optionally labels
/// each agent; it carries no semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuadratic", into = "RawQuadratic")]
pub struct QuadraticProblem {
    c: Vec<f64>,
    d: Vec<f64>,
    a: Matrix,
    b: Vec<f64>,
    tiers: Vec<Tier>,
}

impl TryFrom<RawQuadratic> for QuadraticProblem {
    type Error = Error;

    fn try_from(raw: RawQuadratic) -> Result<Self> {
        let mut p = QuadraticProblem::new(raw.c, raw.d, &raw.a, raw.b)?;
        if !raw.tiers.is_empty() {
            p = p.with_tiers(raw.tiers)?;
        }
        Ok(p)
    }
}

impl From<QuadraticProblem> for RawQuadratic {
    fn from(p: QuadraticProblem) -> Self {
        let a = (0..p.a.rows()).map(|i| p.a.row(i).to_vec()).collect();
        RawQuadratic {
            c: p.c,
            d: p.d,
            a,
            b: p.b,
            tiers: p.tiers,
        }
    }
}

impl QuadraticProblem {
    pub fn new(c: Vec<f64>, d: Vec<f64>, a: &[Vec<f64>], b: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                what: "linear coefficients d",
                expected: n,
                got: d.len(),
            });
        }
        if let Some(i) = c.iter().position(|&ci| !(ci > 0.0 && ci.is_finite())) {
            return Err(Error::InvalidProblem(format!("c[{i}] must be positive, got {}", c[i])));
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                what: "rhs b",
                expected: a.len(),
                got: b.len(),
            });
        }
        let a = if a.is_empty() { Matrix::zeros(0, n) } else { Matrix::from_rows(a)? };
        if a.cols() != n {
            return Err(Error::DimensionMismatch {
                what: "constraint matrix columns",
                expected: n,
                got: a.cols(),
            });
        }
        if a.rows() > n {
            return Err(Error::InvalidProblem(format!(
                "more constraints ({}) than agents ({n})",
                a.rows()
            )));
        }
        if let Some(r) = (0..a.rows()).find(|&r| a.row(r).iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidProblem(format!("constraint row {r} is all zero")));
        }
        Ok(Self {
            c,
            d,
            a,
            b,
            tiers: Vec::new(),
        })
    }

    pub fn with_tiers(mut self, tiers: Vec<Tier>) -> Result<Self> {
        if tiers.len() != self.c.len() {
            return Err(Error::DimensionMismatch {
                what: "tier labels",
                expected: self.c.len(),
                got: tiers.len(),
            });
        }
        self.tiers = tiers;
        Ok(self)
    }

    pub fn num_agents(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    pub fn curvature(&self) -> &[f64] {
        &self.c
    }

    pub fn linear(&self) -> &[f64] {
        &self.d
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    pub fn cost(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.c.iter().zip(&self.d))
            .map(|(&xi, (&ci, &di))| 0.5 * ci * xi * xi + di * xi)
            .sum()
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.a.mul_vec(x).iter().zip(&self.b).map(|(ax, b)| ax - b).collect()
    }

    /// `‖A x − b‖₂`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        norm2(&self.residual(x))
    }

    /// `L(x, λ) = Σ f_i(x_i) + λᵀ(A x − b)`.
    pub fn lagrangian(&self, x: &[f64], lambda: &[f64]) -> Result<f64> {
        if x.len() != self.num_agents() {
            return Err(Error::DimensionMismatch {
                what: "agent vector",
                expected: self.num_agents(),
                got: x.len(),
            });
        }
        if lambda.len() != self.num_constraints() {
            return Err(Error::DimensionMismatch {
                what: "multiplier vector",
                expected: self.num_constraints(),
                got: lambda.len(),
            });
        }
        let r = self.residual(x);
        Ok(self.cost(x) + lambda.iter().zip(&r).map(|(l, ri)| l * ri).sum::<f64>())
    }

    /// Copy with linear coefficients and right-hand side shifted.
    pub fn shifted(&self, linear: f64, rhs: f64) -> Self {
        Self {
            d: self.d.iter().map(|v| v + linear).collect(),
            b: self.b.iter().map(|v| v + rhs).collect(),
            ..self.clone()
        }
    }
}
