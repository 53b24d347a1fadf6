//! Asynchronous primal-dual flow allocation on supply-chain networks.
//!
//! Instances ([`problem`]) are lowered to one saddle-point form. Edge and
//! retailer agents ([`agents`]) run projected primal descent and dual ascent
//! on delayed peer values, orchestrated tick by tick over an impaired
//! network ([`simnet`]). [`baselines`] provides synchronous primal-dual,
//! ADMM, and gradient push on the same traces, and [`analysis`] holds the
//! metrics and the descent, summability, and rate checks.

pub mod agents;
pub mod analysis;
pub mod baselines;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod problem;
pub mod simnet;

pub use error::{Error, Result};
