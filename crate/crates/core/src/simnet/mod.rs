//! Discrete-tick simulation of the agent ensemble over an impaired network.

mod config;
mod drift;
mod engine;
mod impairment;
mod rng;

pub use config::{
    theory_buffer, Algorithm, BaselineParams, GeneratorSpec, InitRule, MetricsConfig, Preset, ProblemSpec, SimConfig,
    THEORY_ITERATIONS,
};
pub use drift::{apply_drift, drift_partial_sums, DriftModel, DriftSchedule};
pub use engine::{initial_point, resolve_lambda_max, run_simulation, MessageLog, SimOutput, TickMessages};
pub use impairment::{ImpairmentModel, Outage};
pub use rng::{bernoulli, inject_noise, sample_delay, stream, AgentStreams, Purpose};
