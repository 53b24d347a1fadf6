use std::collections::BTreeMap;

use super::{CostFunction, Instance, QuadraticProblem, SaddlePoint, SupplyChainProblem};
use crate::error::{Error, Result};
use crate::linalg::{norm2, Lu, Matrix};

/// Residual bound the KKT oracle guarantees on both stationarity and
/// feasibility.
pub const KKT_RESIDUAL_TOL: f64 = 1e-10;

pub fn solve_saddle(instance: &Instance) -> Result<SaddlePoint> {
    match instance {
        Instance::Dag(p) => exact_oracle_greedy(p),
        Instance::Quadratic(q) => exact_oracle_kkt(q),
    }
}

/// Exact LP solution for linear edge costs.
///
/// Constraints couple only the edges entering each retailer, so each
/// retailer is solved independently: fill its inbound edges cheapest-first
/// until demand is met. The price is the cost of the last edge used. Edges
/// that feed no retailer carry no flow.
pub fn exact_oracle_greedy(problem: &SupplyChainProblem) -> Result<SaddlePoint> {
    let mut x = vec![0.0; problem.num_edges()];
    let mut lambda = vec![0.0; problem.num_retailers()];
    let edges = problem.edges();
    let linear_cost = |e: usize| match edges[e].cost {
        CostFunction::Linear(c) => Ok(c),
        CostFunction::Quadratic { .. } => Err(Error::InvalidProblem(format!(
            "greedy oracle requires linear costs; edge `{}` is quadratic",
            edges[e].id
        ))),
    };
    for e in 0..edges.len() {
        linear_cost(e)?;
    }

    let ids: Vec<&str> = problem.retailer_ids().collect();
    for (r, &demand) in problem.demand_vector().iter().enumerate() {
        let mut order = problem.inbound_edges(r).to_vec();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (linear_cost(a).unwrap(), linear_cost(b).unwrap());
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
        let mut remaining = demand;
        for &e in &order {
            if remaining <= 0.0 {
                break;
            }
            let take = edges[e].capacity.min(remaining);
            x[e] = take;
            remaining -= take;
            lambda[r] = linear_cost(e)?;
        }
        if remaining > 0.0 {
            let capacity: f64 = order.iter().map(|&e| edges[e].capacity).sum();
            return Err(Error::Infeasible {
                retailer: ids[r].to_string(),
                capacity,
                demand,
            });
        }
    }
    let optimal_value = edges.iter().zip(&x).map(|(e, &v)| e.cost.value(v)).sum();
    Ok(SaddlePoint {
        x,
        lambda,
        optimal_value,
        metadata: BTreeMap::from([
            ("oracle".into(), "greedy".into()),
            ("tie_break".into(), "ascending cost, then ascending edge index".into()),
        ]),
    })
}

/// Solves the KKT system `diag(c)·x + d + Aᵀλ = 0`, `A x = b` by dense LU
/// with partial pivoting, followed by one round of iterative refinement.
pub fn exact_oracle_kkt(problem: &QuadraticProblem) -> Result<SaddlePoint> {
    let n = problem.num_agents();
    let m = problem.num_constraints();
    let a = problem.matrix();
    let mut kkt = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        kkt.set(i, i, problem.curvature()[i]);
    }
    for r in 0..m {
        for j in 0..n {
            let v = a.get(r, j);
            kkt.set(n + r, j, v);
            kkt.set(j, n + r, v);
        }
    }
    let rhs: Vec<f64> = problem
        .linear()
        .iter()
        .map(|d| -d)
        .chain(problem.rhs().iter().copied())
        .collect();
    let lu = Lu::factor(&kkt)?;
    let mut sol = lu.solve(&rhs);
    let fit = kkt.mul_vec(&sol);
    let correction = lu.solve(&rhs.iter().zip(&fit).map(|(r, f)| r - f).collect::<Vec<_>>());
    for (s, c) in sol.iter_mut().zip(correction) {
        *s += c;
    }

    let x = sol[..n].to_vec();
    let lambda = sol[n..].to_vec();
    let (stationarity, feasibility) = kkt_residuals(problem, &x, &lambda);
    if stationarity > KKT_RESIDUAL_TOL || feasibility > KKT_RESIDUAL_TOL {
        return Err(Error::Analysis(format!(
            "KKT solve inaccurate: stationarity {stationarity:e}, feasibility {feasibility:e}"
        )));
    }
    Ok(SaddlePoint {
        optimal_value: problem.cost(&x),
        x,
        lambda,
        metadata: BTreeMap::from([
            ("oracle".into(), "kkt".into()),
            ("stationarity_residual".into(), format!("{stationarity:e}")),
            ("feasibility_residual".into(), format!("{feasibility:e}")),
        ]),
    })
}

/// `(‖diag(c)x + d + Aᵀλ‖₂, ‖A x − b‖₂)`.
pub fn kkt_residuals(problem: &QuadraticProblem, x: &[f64], lambda: &[f64]) -> (f64, f64) {
    let at_l = problem.matrix().transpose_mul_vec(lambda);
    let stat: Vec<f64> = (0..problem.num_agents())
        .map(|i| problem.curvature()[i] * x[i] + problem.linear()[i] + at_l[i])
        .collect();
    (norm2(&stat), problem.violation(x))
}
