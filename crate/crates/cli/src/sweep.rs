use anyhow::{bail, ensure, Context, Result};
use dapd_core::agents::StepSchedule;
use dapd_core::analysis::RunSummary;
use dapd_core::simnet::{theory_buffer, SimConfig};

use crate::args::SweepArgs;
use crate::compare::{metric_gap, metric_violation, run_grid};
use crate::config::{buffer_is_derived, load, parse_seeds};
use crate::output::{csv_bytes, median, median_opt, prepare_dir, write};

pub const AXES: [&str; 10] =
    ["loss", "gamma", "c_delta", "tau", "sigma", "sigma_c", "sigma_d", "activation", "alpha", "beta"];

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

pub fn parse_axis(text: &str) -> Result<Axis> {
    let (name, values) = text.split_once('=').with_context(|| format!("grid axis `{text}` is not name=v1,v2,..."))?;
    let name = name.trim();
    if !AXES.contains(&name) {
        bail!("unknown grid parameter `{name}` (expected one of {})", AXES.join(", "));
    }
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad value `{v}` for {name}")))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!values.is_empty(), "grid axis `{name}` has no values");
    Ok(Axis { name: name.to_string(), values })
}

/// Row-major cross product: the last axis varies fastest.
pub fn cells(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![vec![]], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect()
    })
}

/// Applies one cell. A theory-preset buffer derived from the delay cap is
/// recomputed unless `tau` is itself on the grid.
pub fn apply_cell(base: &SimConfig, axes: &[Axis], values: &[f64]) -> Result<SimConfig> {
    let mut c = base.clone();
    let derived = buffer_is_derived(&c);
    let mut tau = None;
    for (axis, &v) in axes.iter().zip(values) {
        let imp = &mut c.impairment;
        match axis.name.as_str() {
            "loss" => imp.loss_rate = v,
            "gamma" => imp.delay_exponent = v,
            "c_delta" => imp.delay_cap_coeff = v,
            "tau" => {
                ensure!(v >= 0.0 && v.fract() == 0.0, "tau must be a non-negative integer, got {v}");
                tau = Some(v as usize);
            }
            "sigma" => {
                imp.noise_cost = v;
                imp.noise_demand = v;
            }
            "sigma_c" => imp.noise_cost = v,
            "sigma_d" => imp.noise_demand = v,
            "activation" => imp.activation_prob = v,
            "alpha" => c.alpha = StepSchedule::constant(v),
            "beta" => c.beta = StepSchedule::constant(v),
            other => bail!("unknown grid parameter `{other}`"),
        }
    }
    match tau {
        Some(t) => c.impairment.max_buffer = t,
        None if derived => c.impairment.max_buffer = theory_buffer(&c.impairment, c.iterations),
        None => {}
    }
    c.validate()?;
    Ok(c)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let loaded = load(&args.config)?;
    let axes = args.grid.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>>>()?;
    let mut names: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    names.sort_unstable();
    ensure!(names.windows(2).all(|w| w[0] != w[1]), "a grid parameter appears twice");
    let grid = cells(&axes);
    ensure!(
        grid.len() <= args.max_cells,
        "grid has {} cells, above the cap of {} (raise --max-cells)",
        grid.len(),
        args.max_cells
    );
    let seeds = parse_seeds(&args.seeds)?;
    let configs = grid.iter().map(|v| apply_cell(&loaded.config, &axes, v)).collect::<Result<Vec<_>>>()?;
    let dir = args.out.clone().unwrap_or_else(|| args.output_root.join("sweep"));
    prepare_dir(&dir, args.force)?;

    let mut runs = Vec::new();
    let mut agg = Vec::new();
    for (i, (values, cfg)) in grid.iter().zip(&configs).enumerate() {
        let summaries = run_grid(cfg, loaded.base.as_deref(), &[cfg.algorithm], &seeds, args.jobs)?;
        let params: Vec<String> = values.iter().map(f64::to_string).collect();
        for s in &summaries {
            let mut row = vec![i.to_string()];
            row.extend(params.iter().cloned());
            row.extend(run_columns(s));
            runs.push(row);
        }
        let mut row = vec![i.to_string()];
        row.extend(params);
        row.extend(cell_columns(&summaries));
        agg.push(row);
        eprintln!("cell {}/{} done", i + 1, grid.len());
    }

    let mut run_header = vec!["cell"];
    run_header.extend(axes.iter().map(|a| a.name.as_str()));
    run_header.extend(["seed", "k_star", "final_gap", "final_violation", "messages_sent"]);
    let mut cell_header = vec!["cell"];
    cell_header.extend(axes.iter().map(|a| a.name.as_str()));
    cell_header.extend(["seeds", "converged", "median_k_star", "median_final_gap", "median_final_violation"]);

    write(&dir.join("config.toml"), loaded.config.to_toml_string()?.as_bytes())?;
    write(&dir.join("runs.csv"), &csv_bytes(&run_header, &runs)?)?;
    write(&dir.join("sweep.csv"), &csv_bytes(&cell_header, &agg)?)?;
    println!("wrote {} ({} cells x {} seeds)", dir.display(), grid.len(), seeds.len());
    Ok(())
}

fn run_columns(s: &RunSummary) -> Vec<String> {
    vec![
        s.seed.to_string(),
        s.k_star.map_or(String::new(), |k| k.to_string()),
        metric_gap(s).to_string(),
        metric_violation(s).to_string(),
        s.messages_sent.to_string(),
    ]
}

fn cell_columns(summaries: &[RunSummary]) -> Vec<String> {
    let k = median_opt(&summaries.iter().map(|s| s.k_star.map(|k| k as f64)).collect::<Vec<_>>());
    vec![
        summaries.len().to_string(),
        summaries.iter().filter(|s| s.k_star.is_some()).count().to_string(),
        k.map_or(String::new(), |k| k.to_string()),
        median(&mut summaries.iter().map(metric_gap).collect::<Vec<_>>()).to_string(),
        median(&mut summaries.iter().map(metric_violation).collect::<Vec<_>>()).to_string(),
    ]
}
