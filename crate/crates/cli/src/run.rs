use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dapd_core::analysis::{analyse, AnalysisReport, NoiseBounds, RunSummary, RunTrace};
use dapd_core::experiment::run_on;
use dapd_core::problem::{io, Instance};
use dapd_core::simnet::{Algorithm, ProblemSpec, SimConfig};

use crate::args::{RunArgs, VerifyArgs};
use crate::config::load;
use crate::output::{prepare_dir, write};

pub const CONFIG_FILE: &str = "config.toml";
pub const PROBLEM_FILE: &str = "problem.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ANALYSIS_FILE: &str = "analysis.json";

pub fn run(args: &RunArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let mut config = loaded.config;
    if let Some(a) = &args.algorithm {
        config.algorithm = Algorithm::parse(a)?;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;
    // Everything that can fail on bad input happens before the directory exists.
    let instance = config.problem.resolve(loaded.base.as_deref(), config.seed)?;
    let dir = args.out.clone().unwrap_or_else(|| {
        args.output_root
            .join(format!("{}-{}-s{}", config.preset.as_str(), config.algorithm.as_str(), config.seed))
    });
    let outcome = run_on(&config, instance)?;
    prepare_dir(&dir, args.force)?;
    write_run_dir(&dir, &config, &outcome.instance, &outcome.trace, &outcome.summary)?;
    let s = &outcome.summary;
    println!("wrote {}", dir.display());
    println!(
        "{} K={} final gap {:.4e} violation {:.4e} ergodic gap {:.4e} k*={} messages {}",
        s.algorithm,
        s.iterations,
        s.final_gap,
        s.final_violation,
        s.final_ergodic_gap,
        s.k_star.map_or("none".to_string(), |k| k.to_string()),
        s.messages_sent
    );
    Ok(())
}

/// The echoed config points at the copied problem file when the original was
/// a file, so the directory regenerates itself.
pub fn write_run_dir(dir: &Path, config: &SimConfig, instance: &Instance, trace: &RunTrace, summary: &RunSummary) -> Result<()> {
    let mut echo = config.clone();
    if echo.problem.path.is_some() {
        echo.problem = ProblemSpec::file(PROBLEM_FILE);
    }
    write(&dir.join(CONFIG_FILE), echo.to_toml_string()?.as_bytes())?;
    write(&dir.join(PROBLEM_FILE), io::to_json(instance)?.as_bytes())?;
    write(&dir.join(TRACE_FILE), &trace.to_csv_bytes()?)?;
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    write(&dir.join(SUMMARY_FILE), json.as_bytes())?;
    let stale = dir.join(ANALYSIS_FILE);
    if stale.exists() {
        fs::remove_file(stale)?;
    }
    Ok(())
}

pub struct RunDir {
    pub config: SimConfig,
    pub instance: Instance,
    pub trace: RunTrace,
}

pub fn read_run_dir(dir: &Path) -> Result<RunDir> {
    let path = |f: &str| -> PathBuf { dir.join(f) };
    let config = SimConfig::from_path(&path(CONFIG_FILE)).context("reading config.toml")?;
    let instance = io::read_instance(&path(PROBLEM_FILE)).context("reading problem.json")?;
    let summary: RunSummary =
        serde_json::from_str(&fs::read_to_string(path(SUMMARY_FILE)).context("reading summary.json")?)
            .context("parsing summary.json")?;
    let file = fs::File::open(path(TRACE_FILE)).context("opening trace.csv")?;
    let trace = RunTrace::read_csv(std::io::BufReader::new(file), &summary.algorithm, summary.lambda_max)
        .context("reading trace.csv")?;
    if trace.num_primal() != instance.num_primal() || trace.num_dual() != instance.num_dual() {
        bail!(
            "trace has {} flows and {} prices but the problem has {} and {}",
            trace.num_primal(),
            trace.num_dual(),
            instance.num_primal(),
            instance.num_dual()
        );
    }
    if trace.len() != summary.iterations {
        bail!("trace has {} ticks but the summary records {}", trace.len(), summary.iterations);
    }
    Ok(RunDir { config, instance, trace })
}

pub fn verify_dir(dir: &Path) -> Result<AnalysisReport> {
    let mut rd = read_run_dir(dir)?;
    let noise = NoiseBounds {
        cost: rd.config.impairment.noise_cost,
        demand: rd.config.impairment.noise_demand,
    };
    let m = &rd.config.metrics;
    let report = analyse(&rd.instance, &mut rd.trace, noise, (m.gap_threshold, m.violation_threshold), m.metric)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write(&dir.join(ANALYSIS_FILE), json.as_bytes())?;
    Ok(report)
}

/// Returns whether every check passed.
pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let report = verify_dir(&args.run_dir)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {}", args.run_dir.join(ANALYSIS_FILE).display());
    Ok(report.passed())
}
