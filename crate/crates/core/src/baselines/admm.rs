use crate::analysis::{RunTrace, TickStats, TraceBuilder};
use crate::error::{invalid_param, Result};
use crate::linalg::{norm2, Lu};
use crate::problem::{Instance, QuadraticProblem};

/// ADMM run plus the feasibility of every `z` iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmOutput {
    pub trace: RunTrace,
    /// `‖A z^k − b‖₂` for `k = 1..K`.
    pub z_residuals: Vec<f64>,
}

/// Two-block ADMM on `min Σ f_i(x_i)` s.t. `x = z`, `A z = b`, scaled form:
///
/// ```text
/// x ← (ρ(z − u) − d) / (c + ρ)
/// z ← Π_{Az=b}(x + u)
/// u ← u + x − z
/// ```
///
/// The trace records the agents' `x` and the multiplier estimate
/// `λ = ρ (AAᵀ)⁻¹ (A(x + u) − b)` from the projection step. Each iteration
/// counts `2N` scalar messages (every agent uploads `x_i + u_i` and receives
/// `z_i`).
pub fn admm_run(problem: &QuadraticProblem, rho: f64, iterations: usize, x0: &[f64], lambda_max: f64) -> Result<AdmmOutput> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid_param("rho", format!("must be positive, got {rho}")));
    }
    let inst = Instance::Quadratic(problem.clone());
    let form = inst.to_form();
    let n = problem.num_agents();
    let m = problem.num_constraints();
    crate::analysis::check_dims(&form, x0, &vec![0.0; m])?;
    let a = problem.matrix();
    let b = problem.rhs();
    let gram = Lu::factor(&a.gram())?;
    let (c, d) = (problem.curvature(), problem.linear());

    let mut x = x0.to_vec();
    let mut z = x0.to_vec();
    let mut u = vec![0.0; n];
    let mut lambda = vec![0.0; m];
    let mut builder = TraceBuilder::new("admm", &form, lambda_max, &x, &lambda).with_capacity(iterations);
    let mut z_res = Vec::with_capacity(iterations);
    let per_tick = 2 * n as u64;
    for _ in 0..iterations {
        for i in 0..n {
            x[i] = (rho * (z[i] - u[i]) - d[i]) / (c[i] + rho);
        }
        let v: Vec<f64> = x.iter().zip(&u).map(|(p, q)| p + q).collect();
        let av = a.mul_vec(&v);
        let res: Vec<f64> = av.iter().zip(b).map(|(p, q)| p - q).collect();
        let w = gram.solve(&res);
        let correction = a.transpose_mul_vec(&w);
        for i in 0..n {
            z[i] = v[i] - correction[i];
            u[i] += x[i] - z[i];
        }
        for (l, wi) in lambda.iter_mut().zip(&w) {
            *l = rho * wi;
        }
        z_res.push(norm2(&problem.residual(&z)));
        builder.push(
            &form,
            TickStats {
                sent: per_tick,
                delivered: per_tick,
                ..TickStats::default()
            },
            &x,
            &lambda,
        );
    }
    Ok(AdmmOutput {
        trace: builder.finish(),
        z_residuals: z_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_instance_converges() {
        let q = QuadraticProblem::new(vec![1.0], vec![0.0], &[vec![1.0]], vec![2.0]).unwrap();
        let out = admm_run(&q, 1.0, 200, &[0.0], 4.0).unwrap();
        assert!((out.trace.last().x[0] - 2.0).abs() < 1e-6);
        assert!((out.trace.last().lambda[0] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn z_stays_feasible() {
        let q = crate::problem::generate::supply_chain_quadratic(3, 2, 3, 5).unwrap();
        let out = admm_run(&q, 1.0, 50, &[0.3; 10], 5.0).unwrap();
        assert!(out.z_residuals.iter().all(|&r| r <= 1e-12), "{:?}", out.z_residuals);
    }

    #[test]
    fn rank_deficient_rejected() {
        let q = QuadraticProblem::new(vec![1.0, 1.0], vec![0.0, 0.0], &[vec![1.0, 1.0], vec![2.0, 2.0]], vec![1.0, 2.0])
            .unwrap();
        assert!(admm_run(&q, 1.0, 10, &[0.0, 0.0], 1.0).is_err());
    }
}
