//! Problem instances, their canonical saddle-point form, and exact oracles.

mod cost;
pub(crate) mod dag;
mod form;
pub mod generate;
pub mod io;
mod oracle;
mod quadratic;

use std::collections::BTreeMap;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

pub use cost::CostFunction;
pub use dag::{Edge, Node, SupplyChainProblem, Tier, SLATER_EPSILON};
pub use form::{Column, PrimalDualForm, Row, Sense};
pub use oracle::{exact_oracle_greedy, exact_oracle_kkt, kkt_residuals, solve_saddle, KKT_RESIDUAL_TOL};
pub use quadratic::QuadraticProblem;

use crate::error::Result;

/// Per-edge flows, indexed by edge position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowVector(pub Vec<f64>);

/// Per-retailer prices, in retailer order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceVector(pub Vec<f64>);

macro_rules! vec_newtype {
    ($t:ty) => {
        impl Deref for $t {
            type Target = Vec<f64>;
            fn deref(&self) -> &Vec<f64> {
                &self.0
            }
        }
        impl DerefMut for $t {
            fn deref_mut(&mut self) -> &mut Vec<f64> {
                &mut self.0
            }
        }
    };
}
vec_newtype!(FlowVector);
vec_newtype!(PriceVector);

impl FlowVector {
    pub fn in_box(&self, problem: &SupplyChainProblem) -> bool {
        self.len() == problem.num_edges()
            && self
                .iter()
                .zip(problem.edges())
                .all(|(&x, e)| (0.0..=e.capacity).contains(&x))
    }
}

impl PriceVector {
    pub fn is_nonnegative(&self) -> bool {
        self.iter().all(|&l| l >= 0.0)
    }
}

/// Exact primal-dual solution of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddlePoint {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub optimal_value: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Either problem shape, as stored in problem files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Dag(SupplyChainProblem),
    Quadratic(QuadraticProblem),
}

impl Instance {
    pub fn to_form(&self) -> PrimalDualForm {
        match self {
            Instance::Dag(p) => {
                let columns = p.edges().iter().map(|e| (e.cost, 0.0, e.capacity)).collect();
                let rows = (0..p.num_retailers())
                    .map(|r| Row {
                        entries: p.inbound_edges(r).iter().map(|&e| (e, -1.0)).collect(),
                        rhs: -p.demand_vector()[r],
                    })
                    .collect();
                PrimalDualForm::from_parts(columns, rows, Sense::Inequality)
            }
            Instance::Quadratic(q) => {
                let columns = q
                    .curvature()
                    .iter()
                    .zip(q.linear())
                    .map(|(&c, &d)| (CostFunction::Quadratic { c, d }, f64::NEG_INFINITY, f64::INFINITY))
                    .collect();
                let a = q.matrix();
                let rows = (0..a.rows())
                    .map(|r| Row {
                        entries: a
                            .row(r)
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0.0)
                            .map(|(j, &v)| (j, v))
                            .collect(),
                        rhs: q.rhs()[r],
                    })
                    .collect();
                PrimalDualForm::from_parts(columns, rows, Sense::Equality)
            }
        }
    }

    pub fn num_primal(&self) -> usize {
        match self {
            Instance::Dag(p) => p.num_edges(),
            Instance::Quadratic(q) => q.num_agents(),
        }
    }

    pub fn num_dual(&self) -> usize {
        match self {
            Instance::Dag(p) => p.num_retailers(),
            Instance::Quadratic(q) => q.num_constraints(),
        }
    }

    /// Applies additive parameter offsets: `cost` to every linear cost
    /// coefficient, `demand` to every demand (or right-hand side), and
    /// `capacity` to every capacity (ignored for the unboxed quadratic shape).
    pub fn shifted(&self, cost: f64, demand: f64, capacity: f64) -> Result<Instance> {
        Ok(match self {
            Instance::Dag(p) => Instance::Dag(p.shifted(cost, demand, capacity)?),
            Instance::Quadratic(q) => Instance::Quadratic(q.shifted(cost, demand)),
        })
    }

    pub fn oracle(&self) -> Result<SaddlePoint> {
        solve_saddle(self)
    }
}
