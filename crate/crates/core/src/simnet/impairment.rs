use serde::{Deserialize, Serialize};

use super::drift::DriftModel;
use crate::error::{invalid_param, Result};

/// A window of ticks `[start, end)` during which every message is lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outage {
    pub start: u64,
    pub end: u64,
}

/// Network and observation impairments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentModel {
    /// `c_δ` in the delay cap `⌈c_δ·k^γ⌉`.
    pub delay_cap_coeff: f64,
    /// `γ`, strictly below one half.
    pub delay_exponent: f64,
    /// Buffer depth `τ`; the delay cap never exceeds it.
    pub max_buffer: usize,
    pub loss_rate: f64,
    pub activation_prob: f64,
    /// `σ_c`: half-width of the uniform noise on observed cost gradients.
    pub noise_cost: f64,
    /// `σ_d`: half-width of the uniform noise on observed demands.
    pub noise_demand: f64,
    #[serde(default)]
    pub drift: DriftModel,
    #[serde(default)]
    pub outages: Vec<Outage>,
}

impl Default for ImpairmentModel {
    fn default() -> Self {
        Self::none()
    }
}

impl ImpairmentModel {
    /// No delay, no loss, full activation, exact observations.
    pub fn none() -> Self {
        Self {
            delay_cap_coeff: 0.0,
            delay_exponent: 0.0,
            max_buffer: 0,
            loss_rate: 0.0,
            activation_prob: 1.0,
            noise_cost: 0.0,
            noise_demand: 0.0,
            drift: DriftModel::default(),
            outages: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delay_cap_coeff >= 0.0 && self.delay_cap_coeff.is_finite()) {
            return Err(invalid_param("delay_cap_coeff", format!("must be >= 0, got {}", self.delay_cap_coeff)));
        }
        if !(0.0..0.5).contains(&self.delay_exponent) {
            return Err(invalid_param(
                "delay_exponent",
                format!("must lie in [0, 0.5), got {}", self.delay_exponent),
            ));
        }
        if !(0.0..1.0).contains(&self.loss_rate) {
            return Err(invalid_param("loss_rate", format!("must lie in [0, 1), got {}", self.loss_rate)));
        }
        if !(self.activation_prob > 0.0 && self.activation_prob <= 1.0) {
            return Err(invalid_param(
                "activation_prob",
                format!("must lie in (0, 1], got {}", self.activation_prob),
            ));
        }
        for (name, v) in [("noise_cost", self.noise_cost), ("noise_demand", self.noise_demand)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid_param(name, format!("must be >= 0, got {v}")));
            }
        }
        for o in &self.outages {
            if o.end < o.start {
                return Err(invalid_param("outages", format!("window ends before it starts: {o:?}")));
            }
        }
        self.drift.validate()
    }

    /// `min(τ, ⌈c_δ·k^γ⌉)`, and 0 at `k = 0`.
    pub fn delay_cap(&self, k: u64) -> u64 {
        if k == 0 {
            return 0;
        }
        let raw = (self.delay_cap_coeff * (k as f64).powf(self.delay_exponent)).ceil();
        (raw as u64).min(self.max_buffer as u64)
    }

    pub fn in_outage(&self, k: u64) -> bool {
        self.outages.iter().any(|o| (o.start..o.end).contains(&k))
    }

    pub fn is_noisy(&self) -> bool {
        self.noise_cost > 0.0 || self.noise_demand > 0.0
    }
}
