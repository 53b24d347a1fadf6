use crate::agents::StepSchedule;
use crate::analysis::{RunTrace, TickStats, TraceBuilder};
use crate::error::{Error, Result};
use crate::problem::{Instance, Sense};

/// Synchronous Arrow–Hurwicz iteration on the canonical form.
///
/// Every primal coordinate steps with `λ^k` and every dual coordinate with
/// `x^k`. Each tick counts one scalar message per coordinate.
pub fn sync_pd_run(
    instance: &Instance,
    alpha: &StepSchedule,
    beta: &StepSchedule,
    iterations: usize,
    x0: &[f64],
    lambda0: &[f64],
    lambda_max: f64,
) -> Result<RunTrace> {
    alpha.validate()?;
    beta.validate()?;
    let form = instance.to_form();
    crate::analysis::check_dims(&form, x0, lambda0)?;
    let (n, m) = (form.num_primal(), form.num_dual());
    let mut x: Vec<f64> = x0.iter().enumerate().map(|(j, &v)| form.project_primal(j, v)).collect();
    let mut lambda: Vec<f64> = lambda0.iter().map(|&v| form.project_dual(v)).collect();
    let mut builder = TraceBuilder::new("sync_pd", &form, lambda_max, &x, &lambda).with_capacity(iterations);
    let mut x_next = vec![0.0; n];
    let mut l_next = vec![0.0; m];
    let per_tick = (n + m) as u64;
    for t in 0..iterations as u64 {
        let a = alpha.value(t);
        let b = beta.value(t);
        for (j, col) in form.columns.iter().enumerate() {
            let mut g = col.cost.gradient(x[j]);
            for &(r, coef) in &col.rows {
                g += coef * lambda[r];
            }
            x_next[j] = (x[j] - a * g).clamp(col.lower, col.upper);
        }
        for (r, row) in form.rows.iter().enumerate() {
            let mut s = 0.0;
            for &(j, coef) in &row.entries {
                s += coef * x[j];
            }
            let next = lambda[r] + b * (s - row.rhs);
            l_next[r] = match form.sense {
                Sense::Inequality => next.max(0.0),
                Sense::Equality => next,
            };
        }
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut lambda, &mut l_next);
        if x.iter().any(|v| v.is_nan()) || lambda.iter().any(|v| v.is_nan()) {
            return Err(Error::Invariant(format!("sync_pd produced NaN at tick {t}")));
        }
        builder.push(
            &form,
            TickStats {
                alpha: a,
                beta: b,
                sent: per_tick,
                delivered: per_tick,
                ..TickStats::default()
            },
            &x,
            &lambda,
        );
    }
    Ok(builder.finish())
}
