use anyhow::{Context, Result};
use dapd_core::problem::{io, kkt_residuals, Instance};
use dapd_core::simnet::GeneratorSpec;

use crate::args::{GenerateArgs, GeneratorKind};
use crate::output::{refuse_existing_file, write};

pub fn default_spec(kind: GeneratorKind) -> GeneratorSpec {
    match kind {
        GeneratorKind::ThreeTier => GeneratorSpec::ThreeTier {
            n_s: 2,
            n_w: 3,
            n_r: 5,
            cost_range: (0.5, 2.0),
            demand_range: (0.5, 1.0),
            seed: None,
        },
        GeneratorKind::Fig1 => GeneratorSpec::Fig1 {
            cost_range: (0.5, 2.0),
            demand_range: (0.5, 1.0),
            seed: None,
        },
        GeneratorKind::Quadratic => GeneratorSpec::Quadratic {
            n_s: 2,
            n_w: 3,
            n_r: 5,
            seed: None,
        },
        GeneratorKind::RandomQuadratic => GeneratorSpec::RandomQuadratic { n: 10, m: 4, seed: None },
        GeneratorKind::SmallDag => GeneratorSpec::SmallDag {
            n_retailers: 3,
            max_inbound: 3,
            max_capacity: 3.0,
            seed: None,
        },
    }
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let spec = match (&args.spec, args.kind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing generator spec {}", path.display()))?
        }
        (None, Some(kind)) => default_spec(kind),
        (None, None) => anyhow::bail!("pass --kind or --spec"),
    };
    let instance = spec.build(args.seed)?;
    refuse_existing_file(&args.output, args.force)?;
    write(&args.output, io::to_json(&instance)?.as_bytes())?;
    println!("wrote {}", args.output.display());
    for line in status(&instance)? {
        println!("{line}");
    }
    Ok(())
}

fn status(instance: &Instance) -> Result<Vec<String>> {
    Ok(match instance {
        Instance::Dag(p) => {
            let (slater, _) = p.slater_check();
            vec![
                format!("dag: {} nodes, {} edges, {} retailers", p.nodes().len(), p.num_edges(), p.num_retailers()),
                format!("slater: {}", if slater { "strictly feasible" } else { "FAILS" }),
            ]
        }
        Instance::Quadratic(q) => {
            let saddle = instance.oracle()?;
            let (stationarity, feasibility) = kkt_residuals(q, &saddle.x, &saddle.lambda);
            vec![
                format!("quadratic: {} agents, {} constraints", q.num_agents(), q.num_constraints()),
                format!(
                    "kkt: nonsingular (stationarity residual {:.1e}, feasibility residual {:.1e})",
                    stationarity, feasibility
                ),
            ]
        }
    })
}
