use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dapd_core::simnet::{theory_buffer, Preset, SimConfig};

use crate::args::{ConfigArgs, PresetArg};

/// Resolved config plus the directory relative problem paths resolve against.
pub struct Loaded {
    pub config: SimConfig,
    pub base: Option<PathBuf>,
}

pub fn load(args: &ConfigArgs) -> Result<Loaded> {
    let (mut config, base) = match &args.config {
        Some(path) => {
            let cfg = SimConfig::from_path(path).with_context(|| format!("loading config {}", path.display()))?;
            (cfg, path.parent().map(Path::to_path_buf))
        }
        None => {
            let preset = match args.preset.unwrap_or(PresetArg::Theory) {
                PresetArg::Theory => Preset::Theory,
                PresetArg::ExperimentS10 => Preset::ExperimentS10,
            };
            (SimConfig::preset(preset), None)
        }
    };
    if let Some(k) = args.iterations {
        set_iterations(&mut config, k);
    }
    config.validate()?;
    Ok(Loaded { config, base })
}

/// Changes `K`; a theory-preset buffer that was derived from `K` follows it.
pub fn set_iterations(config: &mut SimConfig, k: usize) {
    let derived = buffer_is_derived(config);
    config.iterations = k;
    if derived {
        config.impairment.max_buffer = theory_buffer(&config.impairment, k);
    }
}

/// True when the buffer equals `⌈c_δ·K^γ⌉` under the theory preset.
pub fn buffer_is_derived(config: &SimConfig) -> bool {
    config.preset == Preset::Theory && config.impairment.max_buffer == theory_buffer(&config.impairment, config.iterations)
}

/// Parses `1-10`, `3`, or `1,4,7` (ranges and lists may be mixed).
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                anyhow::ensure!(a <= b, "empty seed range `{part}`");
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().with_context(|| format!("bad seed `{part}`"))?),
        }
    }
    anyhow::ensure!(!seeds.is_empty(), "no seeds given");
    Ok(seeds)
}
