use std::path::Path;

use anyhow::{ensure, Result};
use dapd_core::analysis::{GapMetric, RunSummary};
use dapd_core::experiment::run_on;
use dapd_core::simnet::{Algorithm, SimConfig};

use crate::args::CompareArgs;
use crate::config::{load, parse_seeds};
use crate::output::{csv_bytes, median, median_opt, par_map, refuse_existing_file, write};

pub const COMPARE_HEADER: [&str; 8] =
    ["algorithm", "seed", "final_cost", "final_gap", "final_violation", "messages_sent", "k_star", "converged"];

/// The gap the config's convergence metric refers to.
pub fn metric_gap(s: &RunSummary) -> f64 {
    match s.convergence_metric {
        GapMetric::Iterate => s.final_gap,
        GapMetric::Ergodic => s.final_ergodic_gap,
    }
}

pub fn metric_violation(s: &RunSummary) -> f64 {
    match s.convergence_metric {
        GapMetric::Iterate => s.final_violation,
        GapMetric::Ergodic => s.final_ergodic_violation,
    }
}

pub fn run_grid(config: &SimConfig, base: Option<&Path>, algorithms: &[Algorithm], seeds: &[u64], jobs: usize) -> Result<Vec<RunSummary>> {
    let jobs_list: Vec<(Algorithm, u64)> = algorithms.iter().flat_map(|&a| seeds.iter().map(move |&s| (a, s))).collect();
    let results = par_map(&jobs_list, jobs, |&(alg, seed)| -> Result<RunSummary> {
        let mut c = config.clone();
        c.algorithm = alg;
        c.seed = seed;
        let instance = c.problem.resolve(base, seed)?;
        Ok(run_on(&c, instance)?.summary)
    });
    results.into_iter().collect()
}

pub fn compare_rows(algorithms: &[Algorithm], summaries: &[RunSummary]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for alg in algorithms {
        let mine: Vec<&RunSummary> = summaries.iter().filter(|s| s.algorithm == alg.as_str()).collect();
        for s in &mine {
            rows.push(vec![
                alg.as_str().to_string(),
                s.seed.to_string(),
                s.final_cost.to_string(),
                metric_gap(s).to_string(),
                metric_violation(s).to_string(),
                s.messages_sent.to_string(),
                s.k_star.map_or(String::new(), |k| k.to_string()),
                u8::from(s.k_star.is_some()).to_string(),
            ]);
        }
        let col = |f: &dyn Fn(&RunSummary) -> f64| median(&mut mine.iter().map(|s| f(s)).collect::<Vec<_>>());
        let k = median_opt(&mine.iter().map(|s| s.k_star.map(|k| k as f64)).collect::<Vec<_>>());
        rows.push(vec![
            alg.as_str().to_string(),
            "median".to_string(),
            col(&|s| s.final_cost).to_string(),
            col(&metric_gap).to_string(),
            col(&metric_violation).to_string(),
            col(&|s| s.messages_sent as f64).to_string(),
            k.map_or(String::new(), |k| k.to_string()),
            mine.iter().filter(|s| s.k_star.is_some()).count().to_string(),
        ]);
    }
    rows
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let algorithms = args
        .algorithms
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(Algorithm::parse)
        .collect::<Result<Vec<_>, _>>()?;
    ensure!(algorithms.len() >= 2, "compare needs at least two algorithms");
    let seeds = parse_seeds(&args.seeds)?;
    if let Some(out) = &args.output {
        refuse_existing_file(out, args.force)?;
    }
    let summaries = run_grid(&loaded.config, loaded.base.as_deref(), &algorithms, &seeds, args.jobs)?;
    let bytes = csv_bytes(&COMPARE_HEADER, &compare_rows(&algorithms, &summaries))?;
    match &args.output {
        Some(out) => {
            write(out, &bytes)?;
            eprintln!("wrote {}", out.display());
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}
