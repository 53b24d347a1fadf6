use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{InitRule, SimConfig};
use super::drift::apply_drift;
use super::rng::{bernoulli, inject_noise, sample_delay, stream, AgentStreams, Purpose};
use crate::agents::{EdgeAgentState, RetailerAgentState};
use crate::analysis::{default_lambda_max, RunTrace, TickStats, TraceBuilder};
use crate::error::{Error, Result};
use crate::problem::{Instance, PrimalDualForm, SaddlePoint};

/// Scalar message counts for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TickMessages {
    pub sent: u64,
    pub dropped: u64,
    pub delivered: u64,
}

/// Per-tick message counts and their running totals.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MessageLog {
    pub ticks: Vec<TickMessages>,
    pub totals: TickMessages,
}

impl MessageLog {
    pub fn record(&mut self, t: TickMessages) {
        self.totals.sent += t.sent;
        self.totals.dropped += t.dropped;
        self.totals.delivered += t.delivered;
        self.ticks.push(t);
    }

    /// `delivered + dropped = sent` at every tick and in total.
    pub fn is_conserved(&self) -> bool {
        self.ticks.iter().chain(std::iter::once(&self.totals)).all(|t| t.delivered + t.dropped == t.sent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub trace: RunTrace,
    pub log: MessageLog,
    /// Largest realised read age over the run, per direction.
    pub max_price_age: u64,
    pub max_flow_age: u64,
}

/// Dual radius for the gap: the config override, else `2·max(1, |λ*|)` from
/// the oracle.
pub fn resolve_lambda_max(config: &SimConfig, instance: &Instance) -> Result<(f64, Option<SaddlePoint>)> {
    let saddle = instance.oracle().ok();
    let lm = match (config.metrics.lambda_max, &saddle) {
        (Some(l), _) => l,
        (None, Some(sp)) => default_lambda_max(&instance.to_form(), sp),
        (None, None) => {
            return Err(Error::Config {
                key: "metrics.lambda_max".into(),
                reason: "no oracle solution for this instance; set the dual radius explicitly".into(),
            })
        }
    };
    Ok((lm, saddle))
}

/// Starting point under `init`; flows are projected onto the box.
pub fn initial_point(form: &PrimalDualForm, init: InitRule, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let x = (0..form.num_primal())
        .map(|j| {
            let raw = match init {
                InitRule::Zero => 0.0,
                InitRule::Uniform { low, high } => stream(seed, j, Purpose::Init).gen_range(low..high),
            };
            form.project_primal(j, raw)
        })
        .collect();
    (x, vec![0.0; form.num_dual()])
}

/// Runs DAPD-SCO for `config.iterations` ticks.
///
/// Tick `t`: parameters drift to their tick-`t` values; each agent is
/// activated with probability `activation_prob`; active agents read their
/// buffers at independently drawn ages, update, and emit one scalar; each
/// emission is lost with probability `loss_rate` (or during an outage) and
/// otherwise lands in every recipient's buffer with stamp `t + 1`. All reads
/// see the buffers as they stood at the end of tick `t − 1`.
pub fn run_simulation(config: &SimConfig, instance: &Instance) -> Result<SimOutput> {
    config.validate()?;
    let (lambda_max, _) = resolve_lambda_max(config, instance)?;
    let model = &config.impairment;
    let mut form = instance.to_form();
    let (n, m) = (form.num_primal(), form.num_dual());
    let (x0, l0) = initial_point(&form, config.init, config.seed);
    let tau = model.max_buffer;

    let mut edges: Vec<EdgeAgentState> = (0..n).map(|j| EdgeAgentState::new(&form, j, x0[j], &l0, tau)).collect();
    let mut retailers: Vec<RetailerAgentState> =
        (0..m).map(|r| RetailerAgentState::new(&form, r, l0[r], &x0, tau)).collect();
    let mut streams: Vec<AgentStreams> = (0..n + m).map(|a| AgentStreams::new(config.seed, a)).collect();

    let mut builder = TraceBuilder::new("dapdsco", &form, lambda_max, &x0, &l0).with_capacity(config.iterations);
    let mut log = MessageLog::default();
    let (mut max_price_age, mut max_flow_age) = (0, 0);
    let drifting = !model.drift.is_constant();
    let mut prices = Vec::new();
    let mut flows = Vec::new();
    let mut emissions: Vec<(usize, f64)> = Vec::with_capacity(n + m);
    let mut x = x0;
    let mut lambda = l0;

    for t in 0..config.iterations as u64 {
        if drifting {
            form = apply_drift(instance, t, &model.drift)?.to_form();
            for ((e, col), xj) in edges.iter_mut().zip(&form.columns).zip(x.iter_mut()) {
                e.set_parameters(col.cost, col.lower, col.upper);
                *xj = e.x();
            }
            for (r, row) in retailers.iter_mut().zip(&form.rows) {
                r.set_rhs(row.rhs);
            }
        }
        let alpha = config.alpha.value(t);
        let beta = config.beta.value(t);
        let (mut delta, mut big_delta) = (0, 0);
        emissions.clear();

        for (j, edge) in edges.iter_mut().enumerate() {
            let rng = &mut streams[j];
            if !bernoulli(&mut rng.activation, model.activation_prob) {
                continue;
            }
            prices.clear();
            for f in 0..edge.feeds.len() {
                let age = sample_delay(&mut rng.delay, t, model);
                let (v, realised) = edge.read_delayed_price(f, t, age);
                delta = delta.max(realised);
                prices.push(v);
            }
            let noise = (model.noise_cost > 0.0).then(|| inject_noise(&mut rng.noise, 0.0, model.noise_cost));
            let xj = edge.update(&prices, alpha, noise);
            if !(edge.lower <= xj && xj <= edge.upper) {
                return Err(Error::Invariant(format!("flow {j} = {xj} left its box at tick {t}")));
            }
            x[j] = xj;
            emissions.push((j, xj));
        }
        for (r, ret) in retailers.iter_mut().enumerate() {
            let rng = &mut streams[n + r];
            if !bernoulli(&mut rng.activation, model.activation_prob) {
                continue;
            }
            flows.clear();
            for f in 0..ret.feeds.len() {
                let age = sample_delay(&mut rng.delay, t, model);
                let (v, realised) = ret.read_delayed_flow(f, t, age);
                big_delta = big_delta.max(realised);
                flows.push(v);
            }
            let noise = (model.noise_demand > 0.0).then(|| inject_noise(&mut rng.noise, 0.0, model.noise_demand));
            let lr = ret.update(&flows, beta, noise);
            if !(form.project_dual(lr) == lr) || lr.is_nan() {
                return Err(Error::Invariant(format!("price {r} = {lr} left the dual cone at tick {t}")));
            }
            lambda[r] = lr;
            emissions.push((n + r, lr));
        }

        let mut tick = TickMessages::default();
        let outage = model.in_outage(t);
        for &(agent, value) in &emissions {
            tick.sent += 1;
            let lost = outage || bernoulli(&mut streams[agent].loss, model.loss_rate);
            if lost {
                tick.dropped += 1;
                continue;
            }
            tick.delivered += 1;
            let stamp = t + 1;
            if agent < n {
                for &(row, _) in &form.columns[agent].rows {
                    retailers[row].receive(agent, stamp, value);
                }
            } else {
                let row = agent - n;
                for &(col, _) in &form.rows[row].entries {
                    edges[col].receive(row, stamp, value);
                }
            }
        }
        log.record(tick);
        max_price_age = max_price_age.max(delta);
        max_flow_age = max_flow_age.max(big_delta);
        builder.push(
            &form,
            TickStats {
                alpha,
                beta,
                delta_max: delta,
                big_delta_max: big_delta,
                sent: tick.sent,
                dropped: tick.dropped,
                delivered: tick.delivered,
            },
            &x,
            &lambda,
        );
    }
    Ok(SimOutput {
        trace: builder.finish(),
        log,
        max_price_age,
        max_flow_age,
    })
}
