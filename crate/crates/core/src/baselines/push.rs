use crate::agents::StepSchedule;
use crate::analysis::{RunTrace, TickStats, TraceBuilder};
use crate::error::{invalid_param, Error, Result};
use crate::linalg::Matrix;
use crate::problem::{Instance, QuadraticProblem};

const STOCHASTIC_TOL: f64 = 1e-12;

/// Column-stochastic mixing weights: `weights[i][j]` is the share agent `j`
/// pushes to agent `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    weights: Matrix,
}

impl MixingMatrix {
    pub fn new(weights: Matrix) -> Result<Self> {
        let n = weights.rows();
        if weights.cols() != n || n == 0 {
            return Err(invalid_param("mixing", "must be a non-empty square matrix"));
        }
        for j in 0..n {
            let col: f64 = (0..n).map(|i| weights.get(i, j)).sum();
            if (col - 1.0).abs() > STOCHASTIC_TOL || (0..n).any(|i| weights.get(i, j) < 0.0) {
                return Err(invalid_param("mixing", format!("column {j} is not stochastic (sums to {col})")));
            }
            if weights.get(j, j) <= 0.0 {
                return Err(invalid_param("mixing", format!("diagonal entry {j} must be positive")));
            }
        }
        let mm = Self { weights };
        if !mm.strongly_connected() {
            return Err(invalid_param("mixing", "communication graph is not strongly connected"));
        }
        Ok(mm)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            w.set(i, i, 1.0);
        }
        Self::new(w)
    }

    /// Each agent keeps `1/(d+1)` and pushes `1/(d+1)` to each of its `d`
    /// out-neighbours.
    pub fn uniform_out(neighbours: &[Vec<usize>]) -> Result<Self> {
        let n = neighbours.len();
        let mut w = Matrix::zeros(n, n);
        for (j, outs) in neighbours.iter().enumerate() {
            let share = 1.0 / (outs.len() + 1) as f64;
            w.set(j, j, share);
            for &i in outs {
                w.set(i, j, share);
            }
        }
        Self::new(w)
    }

    /// Bidirectional ring.
    pub fn ring(n: usize) -> Result<Self> {
        let nb: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut v = vec![(i + 1) % n, (i + n - 1) % n];
                v.sort_unstable();
                v.dedup();
                v.retain(|&j| j != i);
                v
            })
            .collect();
        Self::uniform_out(&nb)
    }

    /// Agents are neighbours when they share a constraint row.
    pub fn from_constraints(problem: &QuadraticProblem) -> Result<Self> {
        let n = problem.num_agents();
        let a = problem.matrix();
        let mut nb = vec![Vec::new(); n];
        for r in 0..a.rows() {
            let members: Vec<usize> = (0..n).filter(|&j| a.get(r, j) != 0.0).collect();
            for &i in &members {
                for &j in &members {
                    if i != j && !nb[i].contains(&j) {
                        nb[i].push(j);
                    }
                }
            }
        }
        for v in &mut nb {
            v.sort_unstable();
        }
        Self::uniform_out(&nb).map_err(|e| match e {
            Error::InvalidParameter { .. } => Error::InvalidProblem(format!("constraint graph unusable for mixing: {e}")),
            other => other,
        })
    }

    pub fn size(&self) -> usize {
        self.weights.rows()
    }

    pub fn weight(&self, to: usize, from: usize) -> f64 {
        self.weights.get(to, from)
    }

    /// Number of off-diagonal positive weights in column `j`.
    pub fn out_degree(&self, j: usize) -> usize {
        (0..self.size()).filter(|&i| i != j && self.weights.get(i, j) > 0.0).count()
    }

    fn strongly_connected(&self) -> bool {
        let n = self.size();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for u in 0..n {
                    let w = if forward { self.weights.get(u, v) } else { self.weights.get(v, u) };
                    if w > 0.0 && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// One push-sum round on `values` (one vector per agent) and `weights`.
    pub fn mix(&self, values: &[Vec<f64>], weights: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.size();
        let dim = values.first().map_or(0, |v| v.len());
        let mut out = vec![vec![0.0; dim]; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let p = self.weights.get(i, j);
                if p == 0.0 {
                    continue;
                }
                w[i] += p * weights[j];
                for (o, v) in out[i].iter_mut().zip(&values[j]) {
                    *o += p * v;
                }
            }
        }
        (out, w)
    }
}

/// Gradient of agent `i`'s share of `Σ f + (μ/2)‖Ax − b‖²` at `y`: its own
/// cost plus the penalty on the rows assigned to it.
fn local_gradient(problem: &QuadraticProblem, owned: &[usize], i: usize, y: &[f64], mu: f64) -> Vec<f64> {
    let a = problem.matrix();
    let mut g = vec![0.0; y.len()];
    g[i] = problem.curvature()[i] * y[i] + problem.linear()[i];
    for &r in owned {
        let row = a.row(r);
        let res: f64 = row.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() - problem.rhs()[r];
        for (gj, aj) in g.iter_mut().zip(row) {
            *gj += mu * res * aj;
        }
    }
    g
}

/// Row `r` is owned by its first agent with the largest `|a_rj|`.
fn row_owners(problem: &QuadraticProblem) -> Vec<Vec<usize>> {
    let a = problem.matrix();
    let mut owned = vec![Vec::new(); problem.num_agents()];
    for r in 0..a.rows() {
        let row = a.row(r);
        let mut best = 0;
        for j in 1..row.len() {
            if row[j].abs() > row[best].abs() {
                best = j;
            }
        }
        owned[best].push(r);
    }
    owned
}

/// Subgradient-push on the penalised objective `Σ f_i + (μ/2)‖Ax − b‖²`.
///
/// Each agent holds an estimate of the whole decision vector and a push-sum
/// weight; per round it mixes, de-biases (`y = value / weight`), and steps
/// along its local gradient at `y`. The trace records each agent's de-biased
/// own coordinate after its step and `λ = μ (A x − b)`. A round costs `N + 1` scalars per directed link.
pub fn gradient_push_run(
    problem: &QuadraticProblem,
    mixing: &MixingMatrix,
    step: &StepSchedule,
    penalty: f64,
    iterations: usize,
    x0: &[f64],
    lambda_max: f64,
) -> Result<RunTrace> {
    step.validate()?;
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(invalid_param("penalty", format!("must be positive, got {penalty}")));
    }
    let n = problem.num_agents();
    if mixing.size() != n {
        return Err(Error::DimensionMismatch {
            what: "mixing matrix",
            expected: n,
            got: mixing.size(),
        });
    }
    let inst = Instance::Quadratic(problem.clone());
    let form = inst.to_form();
    crate::analysis::check_dims(&form, x0, &vec![0.0; problem.num_constraints()])?;
    let owned = row_owners(problem);
    let links: u64 = (0..n).map(|j| mixing.out_degree(j) as u64).sum();
    let per_tick = links * (n as u64 + 1);

    let mut values: Vec<Vec<f64>> = vec![x0.to_vec(); n];
    let mut weights = vec![1.0; n];
    let estimate = |x: &[f64]| -> Vec<f64> { problem.residual(x).iter().map(|r| penalty * r).collect() };
    let mut builder =
        TraceBuilder::new("gradient_push", &form, lambda_max, x0, &estimate(x0)).with_capacity(iterations);
    for t in 0..iterations as u64 {
        let a = step.value(t);
        let (mixed, w) = mixing.mix(&values, &weights);
        let mut x = vec![0.0; n];
        for i in 0..n {
            let y: Vec<f64> = mixed[i].iter().map(|v| v / w[i]).collect();
            let g = local_gradient(problem, &owned[i], i, &y, penalty);
            values[i] = mixed[i].iter().zip(&g).map(|(v, gi)| v - a * gi).collect();
            x[i] = values[i][i] / w[i];
        }
        weights = w;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant(format!("gradient push diverged at tick {t}")));
        }
        builder.push(
            &form,
            TickStats {
                alpha: a,
                sent: per_tick,
                delivered: per_tick,
                ..TickStats::default()
            },
            &x,
            &estimate(&x),
        );
    }
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_consensus_reaches_mean() {
        let mm = MixingMatrix::ring(10).unwrap();
        let init: Vec<f64> = (0..10).map(|i| (i * i) as f64 - 3.0).collect();
        let mean = init.iter().sum::<f64>() / 10.0;
        let mut values: Vec<Vec<f64>> = init.iter().map(|&v| vec![v]).collect();
        let mut w = vec![1.0; 10];
        for _ in 0..500 {
            let (v, ww) = mm.mix(&values, &w);
            values = v;
            w = ww;
        }
        for (v, wi) in values.iter().zip(&w) {
            assert!((v[0] / wi - mean).abs() < 1e-8);
        }
    }

    #[test]
    fn single_agent_is_gradient_descent() {
        let q = QuadraticProblem::new(vec![2.0], vec![1.0], &[vec![1.0]], vec![1.0]).unwrap();
        let mm = MixingMatrix::identity(1).unwrap();
        let s = StepSchedule::constant(0.01);
        let t = gradient_push_run(&q, &mm, &s, 10.0, 50, &[0.0], 4.0).unwrap();
        let mut x = 0.0;
        for rec in &t.records {
            x -= 0.01 * (2.0 * x + 1.0 + 10.0 * (x - 1.0));
            assert!((rec.x[0] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn mixing_validation() {
        let mut w = Matrix::zeros(2, 2);
        w.set(0, 0, 1.0);
        w.set(1, 1, 1.0);
        assert!(MixingMatrix::new(w).is_err(), "two isolated agents are disconnected");
        let mut w = Matrix::zeros(2, 2);
        w.set(0, 0, 0.5);
        w.set(1, 0, 0.4);
        w.set(1, 1, 1.0);
        assert!(MixingMatrix::new(w).is_err());
    }

    #[test]
    fn constraint_graph_is_connected_for_preset() {
        let q = crate::problem::generate::supply_chain_quadratic(1, 2, 3, 5).unwrap();
        let mm = MixingMatrix::from_constraints(&q).unwrap();
        for j in 0..mm.size() {
            let s: f64 = (0..mm.size()).map(|i| mm.weight(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
