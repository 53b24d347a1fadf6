use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::cost::CostFunction;
use super::{FlowVector, PriceVector};
use crate::error::{Error, Result};

/// Relative interior margin for the Slater witness `(1 − ε)·u`.
pub const SLATER_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Supplier,
    Warehouse,
    Retailer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub cost: CostFunction,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawDag {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    demands: BTreeMap<String, f64>,
}

/// A single-commodity flow problem on a DAG: minimise total edge cost subject
/// to every retailer's inbound flow covering its demand, flows boxed by
/// capacity.
///
/// Edges are identified by their position in [`edges`](Self::edges); that
/// index is the edge id used by flow vectors, agents, and traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDag", into = "RawDag")]
pub struct SupplyChainProblem {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    demands: BTreeMap<String, f64>,
    #[serde(skip)]
    index: Index,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Index {
    node_of: HashMap<String, usize>,
    /// Node indices of retailers, in node order.
    retailers: Vec<usize>,
    /// Node index -> position in `retailers`.
    retailer_pos: HashMap<usize, usize>,
    /// Per retailer position, inbound edge indices ascending.
    inbound: Vec<Vec<usize>>,
    /// Per edge, the retailer position it feeds (if any).
    feeds: Vec<Option<usize>>,
    demand: Vec<f64>,
}

impl TryFrom<RawDag> for SupplyChainProblem {
    type Error = Error;

    fn try_from(raw: RawDag) -> Result<Self> {
        SupplyChainProblem::new(raw.nodes, raw.edges, raw.demands)
    }
}

impl From<SupplyChainProblem> for RawDag {
    fn from(p: SupplyChainProblem) -> Self {
        RawDag {
            nodes: p.nodes,
            edges: p.edges,
            demands: p.demands,
        }
    }
}

impl SupplyChainProblem {
    /// Generic constructor: accepts any DAG whose data satisfy the positivity
    /// invariants. Tier ordering is not enforced here.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, demands: BTreeMap<String, f64>) -> Result<Self> {
        let mut node_of = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if node_of.insert(n.id.clone(), i).is_some() {
                return Err(Error::InvalidProblem(format!("duplicate node id `{}`", n.id)));
            }
        }
        let retailers: Vec<usize> = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.tier == Tier::Retailer)
            .map(|(i, _)| i)
            .collect();
        let retailer_pos: HashMap<usize, usize> =
            retailers.iter().enumerate().map(|(p, &i)| (i, p)).collect();

        let mut inbound = vec![Vec::new(); retailers.len()];
        let mut feeds = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut seen_edges = HashMap::new();
        for (e, edge) in edges.iter().enumerate() {
            if seen_edges.insert(edge.id.clone(), e).is_some() {
                return Err(Error::InvalidProblem(format!("duplicate edge id `{}`", edge.id)));
            }
            let from = *node_of
                .get(&edge.from)
                .ok_or_else(|| Error::UnknownNode(edge.from.clone()))?;
            let to = *node_of.get(&edge.to).ok_or_else(|| Error::UnknownNode(edge.to.clone()))?;
            if !(edge.capacity > 0.0 && edge.capacity.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "edge `{}` capacity must be positive, got {}",
                    edge.id, edge.capacity
                )));
            }
            edge.cost.validate()?;
            if let CostFunction::Linear(c) = edge.cost {
                if c <= 0.0 {
                    return Err(Error::InvalidProblem(format!(
                        "edge `{}` cost must be positive, got {c}",
                        edge.id
                    )));
                }
            }
            adjacency[from].push(to);
            let pos = retailer_pos.get(&to).copied();
            if let Some(p) = pos {
                inbound[p].push(e);
            }
            feeds.push(pos);
        }
        check_acyclic(&adjacency, &nodes)?;

        let mut demand = Vec::with_capacity(retailers.len());
        for &r in &retailers {
            let id = &nodes[r].id;
            let d = *demands
                .get(id)
                .ok_or_else(|| Error::InvalidProblem(format!("retailer `{id}` has no demand")))?;
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "retailer `{id}` demand must be positive, got {d}"
                )));
            }
            demand.push(d);
        }
        for id in demands.keys() {
            match node_of.get(id) {
                None => return Err(Error::UnknownNode(id.clone())),
                Some(i) if !retailer_pos.contains_key(i) => return Err(Error::NotRetailer(id.clone())),
                _ => {}
            }
        }

        Ok(Self {
            nodes,
            edges,
            demands,
            index: Index {
                node_of,
                retailers,
                retailer_pos,
                inbound,
                feeds,
                demand,
            },
        })
    }

    /// Constructor that additionally enforces the three-tier ordering
    /// (supplier → warehouse or warehouse → retailer).
    pub fn new_tiered(nodes: Vec<Node>, edges: Vec<Edge>, demands: BTreeMap<String, f64>) -> Result<Self> {
        let p = Self::new(nodes, edges, demands)?;
        for edge in &p.edges {
            let from = p.nodes[p.index.node_of[&edge.from]].tier;
            let to = p.nodes[p.index.node_of[&edge.to]].tier;
            let ok = matches!(
                (from, to),
                (Tier::Supplier, Tier::Warehouse) | (Tier::Warehouse, Tier::Retailer)
            );
            if !ok {
                return Err(Error::InvalidProblem(format!(
                    "edge `{}` violates tier ordering ({from:?} -> {to:?})",
                    edge.id
                )));
            }
        }
        Ok(p)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn demands(&self) -> &BTreeMap<String, f64> {
        &self.demands
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_retailers(&self) -> usize {
        self.index.retailers.len()
    }

    /// Retailer node ids in price-vector order.
    pub fn retailer_ids(&self) -> impl Iterator<Item = &str> {
        self.index.retailers.iter().map(|&i| self.nodes[i].id.as_str())
    }

    /// Demand per retailer, in price-vector order.
    pub fn demand_vector(&self) -> &[f64] {
        &self.index.demand
    }

    /// Inbound edge indices of the retailer at `pos` (price-vector order).
    pub fn inbound_edges(&self, pos: usize) -> &[usize] {
        &self.index.inbound[pos]
    }

    /// Retailer position fed by edge `e`, if its head is a retailer.
    pub fn retailer_fed_by(&self, e: usize) -> Option<usize> {
        self.index.feeds[e]
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.capacity).collect()
    }

    pub fn retailer_position(&self, id: &str) -> Result<usize> {
        let node = *self.index.node_of.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        self.index
            .retailer_pos
            .get(&node)
            .copied()
            .ok_or_else(|| Error::NotRetailer(id.to_string()))
    }

    fn check_flow(&self, x: &FlowVector) -> Result<()> {
        if x.len() != self.edges.len() {
            return Err(Error::DimensionMismatch {
                what: "flow vector",
                expected: self.edges.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_price(&self, lambda: &PriceVector) -> Result<()> {
        if lambda.len() != self.num_retailers() {
            return Err(Error::DimensionMismatch {
                what: "price vector",
                expected: self.num_retailers(),
                got: lambda.len(),
            });
        }
        Ok(())
    }

    /// Inbound flow `h_i(x)` of a retailer, by node id.
    pub fn inbound_flow(&self, x: &FlowVector, retailer: &str) -> Result<f64> {
        self.check_flow(x)?;
        let pos = self.retailer_position(retailer)?;
        Ok(self.inbound_at(x, pos))
    }

    pub(crate) fn inbound_at(&self, x: &[f64], pos: usize) -> f64 {
        self.index.inbound[pos].iter().map(|&e| x[e]).sum()
    }

    /// Total cost `C(x)`.
    pub fn cost(&self, x: &FlowVector) -> Result<f64> {
        self.check_flow(x)?;
        Ok(self.edges.iter().zip(x.iter()).map(|(e, &v)| e.cost.value(v)).sum())
    }

    /// `L(x, λ) = C(x) + Σ_i λ_i (d_i − h_i(x))`.
    pub fn lagrangian(&self, x: &FlowVector, lambda: &PriceVector) -> Result<f64> {
        let cost = self.cost(x)?;
        self.check_price(lambda)?;
        let penalty: f64 = (0..self.num_retailers())
            .map(|p| lambda[p] * (self.index.demand[p] - self.inbound_at(x, p)))
            .sum();
        Ok(cost + penalty)
    }

    /// Slater check with the witness `x̄ = (1 − ε)·u`.
    pub fn slater_check(&self) -> (bool, FlowVector) {
        let witness = FlowVector(
            self.edges
                .iter()
                .map(|e| (1.0 - SLATER_EPSILON) * e.capacity)
                .collect(),
        );
        let ok = (0..self.num_retailers()).all(|p| self.inbound_at(&witness, p) > self.index.demand[p]);
        (ok, witness)
    }

    /// Returns a copy whose linear cost coefficients, demands, and capacities
    /// are shifted by the given offsets.
    pub fn shifted(&self, cost: f64, demand: f64, capacity: f64) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                cost: e.cost.shifted(cost),
                capacity: e.capacity + capacity,
                ..e.clone()
            })
            .collect();
        let demands = self.demands.iter().map(|(k, v)| (k.clone(), v + demand)).collect();
        Self::new(self.nodes.clone(), edges, demands)
    }
}

fn check_acyclic(adjacency: &[Vec<usize>], nodes: &[Node]) -> Result<()> {
    let mut indegree = vec![0usize; adjacency.len()];
    for outs in adjacency {
        for &t in outs {
            indegree[t] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..adjacency.len()).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(n) = stack.pop() {
        visited += 1;
        for &t in &adjacency[n] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                stack.push(t);
            }
        }
    }
    if visited != adjacency.len() {
        let culprit = indegree
            .iter()
            .position(|&d| d > 0)
            .map(|i| nodes[i].id.clone())
            .unwrap_or_default();
        return Err(Error::InvalidProblem(format!("graph has a cycle through `{culprit}`")));
    }
    Ok(())
}
