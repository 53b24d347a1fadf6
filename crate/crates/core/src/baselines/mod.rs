//! Reference comparison algorithms emitting the shared trace schema.

mod admm;
mod push;
mod sync_pd;

pub use admm::{admm_run, AdmmOutput};
pub use push::{gradient_push_run, MixingMatrix};
pub use sync_pd::sync_pd_run;

use crate::analysis::RunTrace;
use crate::error::{invalid_param, Error, Result};
use crate::problem::Instance;
use crate::simnet::{initial_point, Algorithm, SimConfig};

/// A baseline and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    SyncPd,
    Admm { rho: f64 },
    GradientPush { penalty: f64 },
}

impl BaselineKind {
    pub fn from_config(config: &SimConfig) -> Option<Self> {
        match config.algorithm {
            Algorithm::Dapdsco => None,
            Algorithm::SyncPd => Some(BaselineKind::SyncPd),
            Algorithm::Admm => Some(BaselineKind::Admm {
                rho: config.baseline.admm_rho,
            }),
            Algorithm::GradientPush => Some(BaselineKind::GradientPush {
                penalty: config.baseline.push_penalty,
            }),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            BaselineKind::SyncPd => "sync_pd",
            BaselineKind::Admm { .. } => "admm",
            BaselineKind::GradientPush { .. } => "gradient_push",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineKind::Admm { rho } if !(rho > 0.0) => Err(invalid_param("rho", "must be positive")),
            BaselineKind::GradientPush { penalty } if !(penalty > 0.0) => {
                Err(invalid_param("penalty", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Runs `kind` with the config's schedules, horizon, and starting point.
/// Impairments are ignored: baselines are synchronous by definition.
pub fn run_baseline(kind: BaselineKind, config: &SimConfig, instance: &Instance, lambda_max: f64) -> Result<RunTrace> {
    kind.validate()?;
    let form = instance.to_form();
    let (x0, l0) = initial_point(&form, config.init, config.seed);
    let k = config.iterations;
    match (kind, instance) {
        (BaselineKind::SyncPd, _) => sync_pd_run(instance, &config.alpha, &config.beta, k, &x0, &l0, lambda_max),
        (BaselineKind::Admm { rho }, Instance::Quadratic(q)) => Ok(admm_run(q, rho, k, &x0, lambda_max)?.trace),
        (BaselineKind::GradientPush { penalty }, Instance::Quadratic(q)) => {
            let mixing = MixingMatrix::from_constraints(q)?;
            gradient_push_run(q, &mixing, &config.alpha, penalty, k, &x0, lambda_max)
        }
        (kind, Instance::Dag(_)) => Err(Error::Config {
            key: "algorithm".into(),
            reason: format!("{} needs a quadratic equality-constrained instance", kind.tag()),
        }),
    }
}
