use super::buffer::StalenessBuffer;
use crate::problem::{PrimalDualForm, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowFeed {
    pub column: usize,
    pub coefficient: f64,
    pub buffer: StalenessBuffer,
}

/// Owner of one multiplier (a retailer price in the supply-chain shape, a
/// constraint row in the quadratic shape).
///
/// Each tick it aggregates delayed inbound values into the residual
/// `a_rᵀx̃ − b_r` (for a retailer, `d_i − h̃_i`) and takes a projected
/// ascent step.
#[derive(Debug, Clone, PartialEq)]
pub struct RetailerAgentState {
    pub index: usize,
    pub rhs: f64,
    pub sense: Sense,
    pub feeds: Vec<FlowFeed>,
    lambda: f64,
    updates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetailerSnapshot {
    pub index: usize,
    pub lambda: f64,
    pub updates: u64,
}

impl RetailerAgentState {
    pub fn new(form: &PrimalDualForm, index: usize, lambda0: f64, x0: &[f64], tau: usize) -> Self {
        let row = &form.rows[index];
        let feeds = row
            .entries
            .iter()
            .map(|&(column, coefficient)| FlowFeed {
                column,
                coefficient,
                buffer: StalenessBuffer::new(tau, form.project_primal(column, x0[column])),
            })
            .collect();
        Self {
            index,
            rhs: row.rhs,
            sense: form.sense,
            feeds,
            lambda: form.project_dual(lambda0),
            updates: 0,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn snapshot(&self) -> RetailerSnapshot {
        RetailerSnapshot {
            index: self.index,
            lambda: self.lambda,
            updates: self.updates,
        }
    }

    pub fn read_delayed_flow(&self, feed: usize, k: u64, nominal_age: u64) -> (f64, u64) {
        self.feeds[feed].buffer.read(k, nominal_age)
    }

    pub fn receive(&mut self, column: usize, stamp: u64, value: f64) {
        for f in self.feeds.iter_mut().filter(|f| f.column == column) {
            f.buffer.write(stamp, value);
        }
    }

    pub fn residual(&self, flows: &[f64], rhs_noise: Option<f64>) -> f64 {
        let mut s = 0.0;
        for (feed, &v) in self.feeds.iter().zip(flows) {
            s += feed.coefficient * v;
        }
        let rhs = match rhs_noise {
            Some(z) => self.rhs + z,
            None => self.rhs,
        };
        s - rhs
    }

    /// Projected ascent step with delayed inbound values (one per feed).
    pub fn update(&mut self, flows: &[f64], step: f64, rhs_noise: Option<f64>) -> f64 {
        let r = self.residual(flows, rhs_noise);
        let next = self.lambda + step * r;
        self.lambda = match self.sense {
            Sense::Inequality => next.max(0.0),
            Sense::Equality => next,
        };
        self.updates += 1;
        self.lambda
    }

    pub fn set_rhs(&mut self, rhs: f64) {
        self.rhs = rhs;
    }
}
