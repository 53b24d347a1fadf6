//! Seeded instance generators.
//!
//! All generators are deterministic functions of their arguments: the same
//! seed always yields the same instance, bit for bit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CostFunction, Edge, Node, QuadraticProblem, SupplyChainProblem, Tier};
use crate::error::{invalid_param, Result};

/// Inbound capacity per retailer as a multiple of its demand.
pub const CAPACITY_HEADROOM: f64 = 1.5;

fn check_range(name: &'static str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(invalid_param(name, format!("empty or non-finite range [{lo}, {hi}]")));
    }
    Ok(())
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Uniform draw restricted to strictly positive values.
fn positive(rng: &mut ChaCha8Rng, name: &'static str, (lo, hi): (f64, f64)) -> Result<f64> {
    if hi <= 0.0 {
        return Err(invalid_param(name, format!("range [{lo}, {hi}] has no positive values")));
    }
    let lo = lo.max(0.0);
    loop {
        let v = uniform(rng, (lo, hi));
        if v > 0.0 {
            return Ok(v);
        }
    }
}

fn node(id: String, tier: Tier) -> Node {
    Node { id, tier }
}

fn edge(from: &str, to: &str, cost: f64, capacity: f64) -> Edge {
    Edge {
        id: format!("{from}-{to}"),
        from: from.into(),
        to: to.into(),
        cost: CostFunction::Linear(cost),
        capacity,
    }
}

/// Three-tier network with complete bipartite supplier→warehouse and
/// warehouse→retailer layers.
///
/// Costs are uniform on `cost_range`, demands uniform on `demand_range`
/// (positive part). A retailer's inbound capacities are random shares of
/// `1.5 × demand`, so the Slater check always passes. Supplier→warehouse
/// capacities equal the warehouse's outbound capacity split across
/// suppliers.
pub fn three_tier(
    seed: u64,
    n_s: usize,
    n_w: usize,
    n_r: usize,
    cost_range: (f64, f64),
    demand_range: (f64, f64),
) -> Result<SupplyChainProblem> {
    if n_s == 0 || n_w == 0 || n_r == 0 {
        return Err(invalid_param("tiers", "every tier needs at least one node"));
    }
    check_range("cost_range", cost_range)?;
    check_range("demand_range", demand_range)?;
    if cost_range.0 <= 0.0 {
        return Err(invalid_param("cost_range", "costs must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: Vec<String> = (1..=n_s).map(|i| format!("S{i}")).collect();
    let w: Vec<String> = (1..=n_w).map(|i| format!("W{i}")).collect();
    let r: Vec<String> = (1..=n_r).map(|i| format!("R{i}")).collect();

    let mut demands = BTreeMap::new();
    let mut wr_caps = vec![vec![0.0; n_r]; n_w];
    for (j, rid) in r.iter().enumerate() {
        let d = positive(&mut rng, "demand_range", demand_range)?;
        demands.insert(rid.clone(), d);
        let shares: Vec<f64> = (0..n_w).map(|_| rng.gen_range(0.5..1.5)).collect();
        let total: f64 = shares.iter().sum();
        for (i, share) in shares.iter().enumerate() {
            wr_caps[i][j] = CAPACITY_HEADROOM * d * share / total;
        }
    }

    let mut edges = Vec::with_capacity(n_s * n_w + n_w * n_r);
    for sid in &s {
        for (i, wid) in w.iter().enumerate() {
            let out: f64 = wr_caps[i].iter().sum();
            edges.push(edge(sid, wid, uniform(&mut rng, cost_range), out / n_s as f64));
        }
    }
    for (i, wid) in w.iter().enumerate() {
        for (j, rid) in r.iter().enumerate() {
            edges.push(edge(wid, rid, uniform(&mut rng, cost_range), wr_caps[i][j]));
        }
    }

    let nodes = s
        .into_iter()
        .map(|id| node(id, Tier::Supplier))
        .chain(w.into_iter().map(|id| node(id, Tier::Warehouse)))
        .chain(r.into_iter().map(|id| node(id, Tier::Retailer)))
        .collect();
    SupplyChainProblem::new_tiered(nodes, edges, demands)
}

/// One supplier, two warehouses, four retailers; each warehouse serves two
/// retailers over a single edge each (7 nodes, 6 edges).
pub fn fig1(seed: u64, cost_range: (f64, f64), demand_range: (f64, f64)) -> Result<SupplyChainProblem> {
    check_range("cost_range", cost_range)?;
    check_range("demand_range", demand_range)?;
    if cost_range.0 <= 0.0 {
        return Err(invalid_param("cost_range", "costs must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut demands = BTreeMap::new();
    let mut caps = Vec::new();
    for j in 1..=4 {
        let d = positive(&mut rng, "demand_range", demand_range)?;
        demands.insert(format!("R{j}"), d);
        caps.push(CAPACITY_HEADROOM * d);
    }
    let mut edges = vec![
        edge("S", "W1", uniform(&mut rng, cost_range), caps[0] + caps[1]),
        edge("S", "W2", uniform(&mut rng, cost_range), caps[2] + caps[3]),
    ];
    for (j, cap) in caps.iter().enumerate() {
        let w = if j < 2 { "W1" } else { "W2" };
        edges.push(edge(w, &format!("R{}", j + 1), uniform(&mut rng, cost_range), *cap));
    }
    let mut nodes = vec![
        node("S".into(), Tier::Supplier),
        node("W1".into(), Tier::Warehouse),
        node("W2".into(), Tier::Warehouse),
    ];
    nodes.extend((1..=4).map(|j| node(format!("R{j}"), Tier::Retailer)));
    SupplyChainProblem::new_tiered(nodes, edges, demands)
}

/// Per-agent quadratic instance on a three-tier layout.
///
/// Agent order is suppliers, warehouses, retailers; `c_i ~ U(0.5, 2)` and
/// `d_i ~ U(−1, 1)`. The constraint matrix has `n_w + n_r` rows:
///
/// * warehouse row `w`: `Σ_s x_s / n_w − x_w + Σ_{r ∈ R(w)} x_r = 0`, where
///   each supplier's output is split evenly over warehouses, `x_w` is the
///   amount the warehouse retains, and `R(w) = {r : r mod n_w = w}` are the
///   retailers it serves (retailer variables are negative consumptions);
/// * retailer row `r`: `x_r = −D_r` with demand `D_r ~ U(0.5, 1)`.
///
/// Every row has its own pivot column (`x_w` or `x_r`), so `A` has full row
/// rank and the KKT matrix is nonsingular.
pub fn supply_chain_quadratic(seed: u64, n_s: usize, n_w: usize, n_r: usize) -> Result<QuadraticProblem> {
    if n_s == 0 || n_w == 0 || n_r == 0 {
        return Err(invalid_param("tiers", "every tier needs at least one node"));
    }
    let n = n_s + n_w + n_r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let demand: Vec<f64> = (0..n_r).map(|_| rng.gen_range(0.5..1.0)).collect();

    let mut a = vec![vec![0.0; n]; n_w + n_r];
    let mut b = vec![0.0; n_w + n_r];
    for w in 0..n_w {
        for s in 0..n_s {
            a[w][s] = 1.0 / n_w as f64;
        }
        a[w][n_s + w] = -1.0;
        for r in (0..n_r).filter(|r| r % n_w == w) {
            a[w][n_s + n_w + r] = 1.0;
        }
    }
    for r in 0..n_r {
        a[n_w + r][n_s + n_w + r] = 1.0;
        b[n_w + r] = -demand[r];
    }
    let tiers = std::iter::repeat(Tier::Supplier)
        .take(n_s)
        .chain(std::iter::repeat(Tier::Warehouse).take(n_w))
        .chain(std::iter::repeat(Tier::Retailer).take(n_r))
        .collect();
    QuadraticProblem::new(c, d, &a, b)?.with_tiers(tiers)
}

/// Dense random quadratic instance with `m` constraints on `n` agents.
pub fn random_quadratic(seed: u64, n: usize, m: usize) -> Result<QuadraticProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let d = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    QuadraticProblem::new(c, d, &a, b)
}

/// Small random DAG: warehouses feeding retailers with 1–`max_inbound`
/// inbound edges each, capacities in `(0.5, max_capacity]`, demand strictly
/// below total inbound capacity.
pub fn random_small_dag(
    seed: u64,
    n_retailers: usize,
    max_inbound: usize,
    max_capacity: f64,
) -> Result<SupplyChainProblem> {
    if n_retailers == 0 || max_inbound == 0 || max_capacity <= 0.5 {
        return Err(invalid_param("random_small_dag", "empty instance requested"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<Node> = (1..=max_inbound)
        .map(|i| node(format!("W{i}"), Tier::Warehouse))
        .collect();
    let mut edges = Vec::new();
    let mut demands = BTreeMap::new();
    for j in 1..=n_retailers {
        let rid = format!("R{j}");
        nodes.push(node(rid.clone(), Tier::Retailer));
        let k = rng.gen_range(1..=max_inbound);
        let mut total = 0.0;
        for i in 1..=k {
            let u = rng.gen_range(0.5..max_capacity);
            total += u;
            edges.push(edge(&format!("W{i}"), &rid, rng.gen_range(0.5..2.0), u));
        }
        demands.insert(rid, total * rng.gen_range(0.1..0.95));
    }
    SupplyChainProblem::new_tiered(nodes, edges, demands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_tier_shape() {
        let p = three_tier(42, 2, 3, 5, (0.5, 2.0), (0.0, 1.0)).unwrap();
        assert_eq!(p.nodes().len(), 10);
        assert_eq!(p.num_edges(), 21);
    }

    #[test]
    fn three_tier_is_deterministic() {
        let a = three_tier(9, 2, 3, 5, (0.5, 2.0), (0.0, 1.0)).unwrap();
        let b = three_tier(9, 2, 3, 5, (0.5, 2.0), (0.0, 1.0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, three_tier(10, 2, 3, 5, (0.5, 2.0), (0.0, 1.0)).unwrap());
    }

    #[test]
    fn three_tier_always_slater() {
        for seed in 0..100 {
            let p = three_tier(seed, 2, 3, 5, (0.5, 2.0), (0.0, 1.0)).unwrap();
            assert!(p.slater_check().0, "seed {seed}");
        }
    }

    #[test]
    fn rejects_empty_ranges() {
        assert!(three_tier(1, 2, 3, 5, (2.0, 0.5), (0.0, 1.0)).is_err());
        assert!(three_tier(1, 2, 3, 5, (0.5, 2.0), (-1.0, 0.0)).is_err());
        assert!(three_tier(1, 0, 3, 5, (0.5, 2.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn fig1_shape() {
        let p = fig1(1, (0.5, 2.0), (0.0, 1.0)).unwrap();
        assert_eq!((p.nodes().len(), p.num_edges(), p.num_retailers()), (7, 6, 4));
        assert!(p.slater_check().0);
    }

    #[test]
    fn quadratic_layout() {
        let q = supply_chain_quadratic(3, 2, 3, 5).unwrap();
        assert_eq!((q.num_agents(), q.num_constraints()), (10, 8));
        assert!(super::super::exact_oracle_kkt(&q).is_ok());
    }
}
