use super::buffer::StalenessBuffer;
use crate::problem::{CostFunction, PrimalDualForm};

/// One price feed into an edge agent: the row it prices, the agent's
/// coefficient in that row, and the buffer of received prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceFeed {
    pub row: usize,
    pub coefficient: f64,
    pub buffer: StalenessBuffer,
}

/// Owner of one primal coordinate (an edge flow in the supply-chain shape,
/// an agent's decision in the quadratic shape).
///
/// Each tick it reads delayed prices, takes a projected gradient step on
/// `f(x) + Σ_r a_r·λ̃_r·x`, and broadcasts the new value.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAgentState {
    pub index: usize,
    pub cost: CostFunction,
    pub lower: f64,
    pub upper: f64,
    pub feeds: Vec<PriceFeed>,
    x: f64,
    updates: u64,
}

/// Read-only view for tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSnapshot {
    pub index: usize,
    pub x: f64,
    pub updates: u64,
}

impl EdgeAgentState {
    pub fn new(form: &PrimalDualForm, index: usize, x0: f64, lambda0: &[f64], tau: usize) -> Self {
        let col = &form.columns[index];
        let feeds = col
            .rows
            .iter()
            .map(|&(row, coefficient)| PriceFeed {
                row,
                coefficient,
                buffer: StalenessBuffer::new(tau, lambda0[row]),
            })
            .collect();
        Self {
            index,
            cost: col.cost,
            lower: col.lower,
            upper: col.upper,
            feeds,
            x: form.project_primal(index, x0),
            updates: 0,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn snapshot(&self) -> EdgeSnapshot {
        EdgeSnapshot {
            index: self.index,
            x: self.x,
            updates: self.updates,
        }
    }

    /// Delayed price on feed `feed`: `(value, realised age)`.
    pub fn read_delayed_price(&self, feed: usize, k: u64, nominal_age: u64) -> (f64, u64) {
        self.feeds[feed].buffer.read(k, nominal_age)
    }

    pub fn receive(&mut self, row: usize, stamp: u64, price: f64) {
        for f in self.feeds.iter_mut().filter(|f| f.row == row) {
            f.buffer.write(stamp, price);
        }
    }

    /// Projected gradient step with the given delayed prices (one per feed,
    /// in feed order). `cost_noise` perturbs the observed cost gradient.
    pub fn update(&mut self, prices: &[f64], step: f64, cost_noise: Option<f64>) -> f64 {
        let g = self.gradient(prices, cost_noise);
        self.x = (self.x - step * g).clamp(self.lower, self.upper);
        self.updates += 1;
        self.x
    }

    pub fn gradient(&self, prices: &[f64], cost_noise: Option<f64>) -> f64 {
        let mut g = self.cost.gradient(self.x);
        if let Some(xi) = cost_noise {
            g += xi;
        }
        for (feed, &price) in self.feeds.iter().zip(prices) {
            g += feed.coefficient * price;
        }
        g
    }

    /// Replaces the cost and box (parameter drift); the flow is re-projected.
    pub fn set_parameters(&mut self, cost: CostFunction, lower: f64, upper: f64) {
        self.cost = cost;
        self.lower = lower;
        self.upper = upper;
        self.x = self.x.clamp(lower, upper);
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::single_edge_form;
    use super::*;

    fn agent(c: f64, u: f64, x0: f64) -> EdgeAgentState {
        let form = single_edge_form(c, u, 3.0);
        EdgeAgentState::new(&form, 0, x0, &[0.0], 2)
    }

    #[test]
    fn gradient_step() {
        let mut a = agent(2.0, 5.0, 1.0);
        let x = a.update(&[0.5], 0.1, None);
        assert!((a.gradient(&[0.5], None) - 1.5).abs() < 1e-15);
        assert!((x - 0.85).abs() < 1e-15);
        assert_eq!(a.updates(), 1);
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut a = agent(2.0, 5.0, 3.3);
        assert_eq!(a.update(&[2.0], 0.7, None), 3.3);
    }

    #[test]
    fn projects_onto_capacity() {
        let mut a = agent(1.0, 5.0, 4.9);
        assert_eq!(a.update(&[100.0], 1.0, None), 5.0);
    }

    #[test]
    fn initial_read_is_prefill() {
        let a = agent(1.0, 5.0, 0.0);
        assert_eq!(a.read_delayed_price(0, 0, 3), (0.0, 0));
    }
}
