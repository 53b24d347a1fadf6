use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::impairment::ImpairmentModel;

/// What a random stream is used for. Each `(agent, purpose)` pair gets its
/// own ChaCha stream, so turning one impairment on does not shift the draws
/// of another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Activation = 0,
    Delay = 1,
    Loss = 2,
    Noise = 3,
    Init = 4,
}

const PURPOSES: u64 = 8;

/// Stream for `agent` (edges first, then retailers) and `purpose`.
pub fn stream(seed: u64, agent: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent as u64 * PURPOSES + purpose as u64);
    rng
}

/// The four per-tick streams one agent draws from.
#[derive(Debug, Clone)]
pub struct AgentStreams {
    pub activation: ChaCha8Rng,
    pub delay: ChaCha8Rng,
    pub loss: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl AgentStreams {
    pub fn new(seed: u64, agent: usize) -> Self {
        Self {
            activation: stream(seed, agent, Purpose::Activation),
            delay: stream(seed, agent, Purpose::Delay),
            loss: stream(seed, agent, Purpose::Loss),
            noise: stream(seed, agent, Purpose::Noise),
        }
    }
}

/// Uniform integer on `[0, cap(k)]`. Draws nothing when the cap is zero.
pub fn sample_delay<R: Rng>(rng: &mut R, k: u64, model: &ImpairmentModel) -> u64 {
    match model.delay_cap(k) {
        0 => 0,
        cap => rng.gen_range(0..=cap),
    }
}

/// `value + U[−σ, σ]`. Draws nothing when `σ = 0`.
pub fn inject_noise<R: Rng>(rng: &mut R, value: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        value
    } else {
        value + rng.gen_range(-sigma..=sigma)
    }
}

/// Bernoulli draw; certain outcomes draw nothing.
pub fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.gen::<f64>() < p
    }
}
