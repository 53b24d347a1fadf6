use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::impairment::ImpairmentModel;
use crate::agents::StepSchedule;
use crate::analysis::GapMetric;
use crate::error::{invalid_param, Error, Result};
use crate::problem::{generate, io, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Diminishing steps, sublinear delays, long horizon.
    #[serde(rename = "theory")]
    Theory,
    /// The quadratic three-tier protocol: 2000 ticks, constant steps,
    /// staleness up to 5, 10% loss.
    #[serde(rename = "experiment-s10")]
    ExperimentS10,
}

impl Preset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Theory => "theory",
            Preset::ExperimentS10 => "experiment-s10",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dapdsco,
    SyncPd,
    Admm,
    GradientPush,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Dapdsco, Algorithm::SyncPd, Algorithm::Admm, Algorithm::GradientPush];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Dapdsco => "dapdsco",
            Algorithm::SyncPd => "sync_pd",
            Algorithm::Admm => "admm",
            Algorithm::GradientPush => "gradient_push",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "dapdsco" => Algorithm::Dapdsco,
            "sync_pd" => Algorithm::SyncPd,
            "admm" => Algorithm::Admm,
            "gradient_push" => Algorithm::GradientPush,
            _ => {
                return Err(Error::Config {
                    key: "algorithm".into(),
                    reason: format!("unknown algorithm `{s}` (expected dapdsco, sync_pd, admm, gradient_push)"),
                })
            }
        })
    }
}

/// Starting point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitRule {
    /// `x⁰` projected from 0, `λ⁰ = 0`.
    Zero,
    /// `x⁰_j ~ U(low, high)` projected onto the box, `λ⁰ = 0`.
    Uniform { low: f64, high: f64 },
}

/// Instance recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    ThreeTier {
        n_s: usize,
        n_w: usize,
        n_r: usize,
        cost_range: (f64, f64),
        demand_range: (f64, f64),
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Fig1 {
        cost_range: (f64, f64),
        demand_range: (f64, f64),
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Quadratic {
        n_s: usize,
        n_w: usize,
        n_r: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    RandomQuadratic {
        n: usize,
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    SmallDag {
        n_retailers: usize,
        max_inbound: usize,
        max_capacity: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl GeneratorSpec {
    /// Builds the instance. The recipe's own seed wins over `default_seed`.
    pub fn build(&self, default_seed: u64) -> Result<Instance> {
        let pick = |s: &Option<u64>| s.unwrap_or(default_seed);
        Ok(match self {
            GeneratorSpec::ThreeTier { n_s, n_w, n_r, cost_range, demand_range, seed } => {
                Instance::Dag(generate::three_tier(pick(seed), *n_s, *n_w, *n_r, *cost_range, *demand_range)?)
            }
            GeneratorSpec::Fig1 { cost_range, demand_range, seed } => {
                Instance::Dag(generate::fig1(pick(seed), *cost_range, *demand_range)?)
            }
            GeneratorSpec::Quadratic { n_s, n_w, n_r, seed } => {
                Instance::Quadratic(generate::supply_chain_quadratic(pick(seed), *n_s, *n_w, *n_r)?)
            }
            GeneratorSpec::RandomQuadratic { n, m, seed } => {
                Instance::Quadratic(generate::random_quadratic(pick(seed), *n, *m)?)
            }
            GeneratorSpec::SmallDag { n_retailers, max_inbound, max_capacity, seed } => Instance::Dag(
                generate::random_small_dag(pick(seed), *n_retailers, *max_inbound, *max_capacity)?,
            ),
        })
    }
}

/// Where the instance comes from: a problem file or a generator.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

impl ProblemSpec {
    pub fn file(path: impl Into<PathBuf>) -> Self {
        Self {
            path: Some(path.into()),
            generator: None,
        }
    }

    pub fn generated(g: GeneratorSpec) -> Self {
        Self {
            path: None,
            generator: Some(g),
        }
    }

    /// Loads or generates. Relative paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>, default_seed: u64) -> Result<Instance> {
        match (&self.path, &self.generator) {
            (Some(p), None) => {
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                io::read_instance(&full)
            }
            (None, Some(g)) => g.build(default_seed),
            _ => Err(Error::Config {
                key: "problem".into(),
                reason: "set exactly one of `problem.path` and `problem.generator`".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineParams {
    /// ADMM penalty `ρ`.
    pub admm_rho: f64,
    /// Gradient-push constraint penalty `μ`.
    pub push_penalty: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            admm_rho: 1.0,
            push_penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    pub gap_threshold: f64,
    pub violation_threshold: f64,
    pub metric: GapMetric,
    /// Overrides the oracle-derived dual radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            gap_threshold: 0.1,
            violation_threshold: 0.05,
            metric: GapMetric::Iterate,
            lambda_max: None,
        }
    }
}

/// Everything a run needs besides the instance itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub preset: Preset,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub iterations: usize,
    pub init: InitRule,
    pub problem: ProblemSpec,
    pub alpha: StepSchedule,
    pub beta: StepSchedule,
    pub impairment: ImpairmentModel,
    pub baseline: BaselineParams,
    pub metrics: MetricsConfig,
}

/// Theory horizon.
pub const THEORY_ITERATIONS: usize = 100_000;

impl SimConfig {
    /// Diminishing steps `1/√(k+1)`, delays capped at `⌈k^0.3⌉` with
    /// `τ = ⌈K^0.3⌉`, no loss, on a seeded seven-node `fig1` network.
    pub fn theory() -> Self {
        let mut impairment = ImpairmentModel {
            delay_cap_coeff: 1.0,
            delay_exponent: 0.3,
            ..ImpairmentModel::none()
        };
        impairment.max_buffer = theory_buffer(&impairment, THEORY_ITERATIONS);
        Self {
            preset: Preset::Theory,
            algorithm: Algorithm::Dapdsco,
            seed: 1,
            iterations: THEORY_ITERATIONS,
            init: InitRule::Zero,
            problem: ProblemSpec::generated(GeneratorSpec::Fig1 {
                cost_range: (0.5, 2.0),
                demand_range: (0.5, 1.0),
                seed: None,
            }),
            alpha: StepSchedule::default(),
            beta: StepSchedule::default(),
            impairment,
            baseline: BaselineParams::default(),
            metrics: MetricsConfig {
                metric: GapMetric::Ergodic,
                ..MetricsConfig::default()
            },
        }
    }

    /// 2000 ticks, `α = 0.01`, `β = 0.05`, staleness uniform on `[0, 5]`,
    /// 10% loss, `x⁰ ~ U(−1, 1)`, on a seeded 2/3/5 quadratic instance.
    pub fn experiment_s10() -> Self {
        Self {
            preset: Preset::ExperimentS10,
            algorithm: Algorithm::Dapdsco,
            seed: 1,
            iterations: 2000,
            init: InitRule::Uniform { low: -1.0, high: 1.0 },
            problem: ProblemSpec::generated(GeneratorSpec::Quadratic {
                n_s: 2,
                n_w: 3,
                n_r: 5,
                seed: None,
            }),
            alpha: StepSchedule::constant(0.01),
            beta: StepSchedule::constant(0.05),
            impairment: ImpairmentModel {
                delay_cap_coeff: 5.0,
                delay_exponent: 0.0,
                max_buffer: 5,
                loss_rate: 0.1,
                ..ImpairmentModel::none()
            },
            baseline: BaselineParams::default(),
            metrics: MetricsConfig::default(),
        }
    }

    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Theory => Self::theory(),
            Preset::ExperimentS10 => Self::experiment_s10(),
        }
    }

    /// Parses a config file layered over its preset's defaults. Keys absent
    /// from the file keep the preset value; for the theory preset an absent
    /// `impairment.max_buffer` is resized to `⌈c_δ·K^γ⌉`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse()?;
        let preset = match user.get("preset") {
            None => Preset::Theory,
            Some(toml::Value::String(s)) => match s.as_str() {
                "theory" => Preset::Theory,
                "experiment-s10" => Preset::ExperimentS10,
                other => {
                    return Err(Error::Config {
                        key: "preset".into(),
                        reason: format!("unknown preset `{other}` (expected theory or experiment-s10)"),
                    })
                }
            },
            Some(_) => {
                return Err(Error::Config {
                    key: "preset".into(),
                    reason: "must be a string".into(),
                })
            }
        };
        let explicit_buffer = user
            .get("impairment")
            .and_then(|v| v.as_table())
            .is_some_and(|t| t.contains_key("max_buffer"));
        let replaces_problem = user.contains_key("problem");
        let mut base = toml::Table::try_from(Self::preset(preset))?;
        if replaces_problem {
            base.remove("problem");
        }
        merge(&mut base, user);
        let mut cfg: SimConfig = toml::Value::Table(base).try_into()?;
        if preset == Preset::Theory && !explicit_buffer {
            cfg.impairment.max_buffer = theory_buffer(&cfg.impairment, cfg.iterations);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(invalid_param("iterations", "K must be at least 1"));
        }
        self.alpha.validate()?;
        self.beta.validate()?;
        self.impairment.validate()?;
        if let InitRule::Uniform { low, high } = self.init {
            if !(low < high) {
                return Err(invalid_param("init", format!("empty range [{low}, {high}]")));
            }
        }
        if !(self.baseline.admm_rho > 0.0) {
            return Err(invalid_param("baseline.admm_rho", "must be positive"));
        }
        if !(self.baseline.push_penalty > 0.0) {
            return Err(invalid_param("baseline.push_penalty", "must be positive"));
        }
        if !(self.metrics.gap_threshold > 0.0 && self.metrics.violation_threshold > 0.0) {
            return Err(invalid_param("metrics", "thresholds must be positive"));
        }
        if let Some(l) = self.metrics.lambda_max {
            if !(l > 0.0) {
                return Err(invalid_param("metrics.lambda_max", "must be positive"));
            }
        }
        Ok(())
    }

    /// Same config with every impairment switched off.
    pub fn without_impairments(&self) -> Self {
        Self {
            impairment: ImpairmentModel::none(),
            ..self.clone()
        }
    }
}

/// `⌈c_δ·K^γ⌉`, the largest cap reached within `K` ticks.
pub fn theory_buffer(model: &ImpairmentModel, k: usize) -> usize {
    (model.delay_cap_coeff * (k as f64).powf(model.delay_exponent)).ceil() as usize
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !is_tagged(b) && !is_tagged(&o) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Tagged enums (`kind = ...`) are replaced wholesale, never merged.
fn is_tagged(t: &toml::Table) -> bool {
    t.contains_key("kind")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_roundtrip() {
        for p in [SimConfig::theory(), SimConfig::experiment_s10()] {
            p.validate().unwrap();
            let text = p.to_toml_string().unwrap();
            assert_eq!(SimConfig::from_toml_str(&text).unwrap(), p);
        }
    }

    #[test]
    fn theory_buffer_matches_cap() {
        let c = SimConfig::theory();
        assert_eq!(c.impairment.max_buffer, 32);
        let small = SimConfig::from_toml_str("iterations = 1000").unwrap();
        assert_eq!(small.impairment.max_buffer, 8);
    }

    #[test]
    fn overrides_layer_on_preset() {
        let c = SimConfig::from_toml_str(
            "preset = \"experiment-s10\"\nseed = 7\n[impairment]\nloss_rate = 0.3\n[alpha]\nkind = \"diminishing\"\nscale = 1.0\nexponent = 0.5\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.impairment.loss_rate, 0.3);
        assert_eq!(c.impairment.max_buffer, 5);
        assert_eq!(c.alpha, StepSchedule::default());
        assert_eq!(c.iterations, 2000);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = SimConfig::from_toml_str("[impairment]\nlos_rate = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("los_rate"), "{err}");
        let err = SimConfig::from_toml_str("preset = \"fast\"").unwrap_err();
        assert!(err.to_string().contains("preset"), "{err}");
    }

    #[test]
    fn gamma_half_rejected() {
        let err = SimConfig::from_toml_str("[impairment]\ndelay_exponent = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("delay_exponent"), "{err}");
    }

    #[test]
    fn problem_file_replaces_generator() {
        let c = SimConfig::from_toml_str("[problem]\npath = \"p.json\"\n").unwrap();
        assert_eq!(c.problem, ProblemSpec::file("p.json"));
    }
}
