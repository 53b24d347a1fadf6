//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_FAILURES` are run exactly as stated and print
//! FAIL when they fail, but do not fail the target.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use dapd_core::analysis::{
    annotate_lyapunov, error_series_check, lyapunov_descent_check, rate_slope, NoiseBounds, TheoryConstants, SLOPE_BAND,
    SUMMABLE_TAIL_FRACTION,
};
use dapd_core::experiment::run_on;
use dapd_core::problem::generate::{random_quadratic, random_small_dag, supply_chain_quadratic, three_tier};
use dapd_core::problem::{exact_oracle_greedy, exact_oracle_kkt, kkt_residuals, Instance, SupplyChainProblem, KKT_RESIDUAL_TOL};
use dapd_core::simnet::{
    run_simulation, Algorithm, DriftSchedule, GeneratorSpec, ProblemSpec, SimConfig,
};

const KNOWN_FAILURES: [u32; 3] = [4, 6, 7];

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn median_k(v: &[Option<u64>]) -> f64 {
    median(&mut v.iter().map(|k| k.map_or(f64::INFINITY, |k| k as f64)).collect::<Vec<_>>())
}

fn theory(seed: u64) -> (SimConfig, Instance) {
    let mut c = SimConfig::theory();
    c.seed = seed;
    let inst = c.problem.resolve(None, seed).unwrap();
    (c, inst)
}

fn c1_sync_equivalence() -> Outcome {
    let mut c = SimConfig::theory().without_impairments();
    c.iterations = 1000;
    c.seed = 11;
    let inst = c.problem.resolve(None, c.seed).unwrap();
    let a = run_on(&c, inst.clone()).unwrap().trace.to_csv_bytes().unwrap();
    c.algorithm = Algorithm::SyncPd;
    let b = run_on(&c, inst).unwrap().trace.to_csv_bytes().unwrap();
    pass_if(a == b, format!("trace bytes {} vs {}, identical = {}", a.len(), b.len(), a == b))
}

fn c2_lyapunov_descent() -> Outcome {
    let mut total = 0;
    let mut checked = 0;
    for seed in 1..=5 {
        let mut c = SimConfig::theory();
        c.seed = seed;
        c.iterations = 10_000;
        c.impairment.max_buffer = dapd_core::simnet::theory_buffer(&c.impairment, c.iterations);
        c.problem = ProblemSpec::generated(GeneratorSpec::SmallDag {
            n_retailers: 3,
            max_inbound: 3,
            max_capacity: 3.0,
            seed: None,
        });
        let inst = c.problem.resolve(None, seed).unwrap();
        let form = inst.to_form();
        let saddle = inst.oracle().unwrap();
        let mut trace = run_simulation(&c, &inst).unwrap().trace;
        let k = TheoryConstants::for_trace(&form, &saddle, &trace, trace.lambda_max, NoiseBounds::default()).unwrap();
        annotate_lyapunov(&mut trace, &form, &saddle, &k).unwrap();
        let r = lyapunov_descent_check(&trace).unwrap();
        assert!(r.steps_matched);
        total += r.violations.len() + r.supermartingale_violations;
        checked += r.checked;
    }
    pass_if(total == 0, format!("{checked} transitions over 5 instances, {total} violations"))
}

fn c3_rate() -> Outcome {
    let mut slopes: Vec<f64> = (1..=5)
        .map(|seed| {
            let (c, inst) = theory(seed);
            rate_slope(&run_on(&c, inst).unwrap().trace).unwrap().slope
        })
        .collect();
    let m = median(&mut slopes);
    pass_if(
        (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&m),
        format!("median slope {m:.4}, band [{}, {}], seeds {slopes:.3?}", SLOPE_BAND.0, SLOPE_BAND.1),
    )
}

fn c4_summability() -> Outcome {
    let (c, inst) = theory(1);
    let form = inst.to_form();
    let saddle = inst.oracle().unwrap();
    let mut trace = run_on(&c, inst).unwrap().trace;
    let k = TheoryConstants::for_trace(&form, &saddle, &trace, trace.lambda_max, NoiseBounds::default()).unwrap();
    annotate_lyapunov(&mut trace, &form, &saddle, &k).unwrap();
    let s = error_series_check(&trace, k.g * k.u, k.d * k.dual_radius).unwrap();

    let c2 = SimConfig::experiment_s10();
    let inst2 = c2.problem.resolve(None, 1).unwrap();
    let form2 = inst2.to_form();
    let saddle2 = inst2.oracle().unwrap();
    let mut t2 = run_on(&c2, inst2).unwrap().trace;
    let k2 = TheoryConstants::for_trace(&form2, &saddle2, &t2, t2.lambda_max, NoiseBounds::default()).unwrap();
    annotate_lyapunov(&mut t2, &form2, &saddle2, &k2).unwrap();
    let s2 = error_series_check(&t2, k2.g * k2.u, k2.d * k2.dual_radius).unwrap();

    pass_if(
        s.tail_fraction < SUMMABLE_TAIL_FRACTION && !s2.summable,
        format!(
            "gamma=0.3: sum(K/2)={:.4e} sum(K)={:.4e} growth {:.2}% (need < {}%); constant steps non-summable = {}",
            s.half_sum,
            s.partial_sum,
            100.0 * s.tail_fraction,
            100.0 * SUMMABLE_TAIL_FRACTION,
            !s2.summable
        ),
    )
}

fn c5_messages() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let cases: Vec<(&str, SimConfig, Instance)> = vec![
        {
            let mut c = SimConfig::theory();
            c.iterations = 5000;
            let i = c.problem.resolve(None, 1).unwrap();
            ("fig1 delayed", c, i)
        },
        {
            let mut c = SimConfig::theory().without_impairments();
            c.iterations = 777;
            let i = Instance::Dag(three_tier(4, 2, 3, 5, (0.5, 2.0), (0.5, 1.0)).unwrap());
            ("three-tier sync", c, i)
        },
    ];
    for (name, c, inst) in cases {
        let out = run_simulation(&c, &inst).unwrap();
        let expect = c.iterations as u64 * (inst.num_primal() + inst.num_dual()) as u64;
        let sent = out.trace.total_sent();
        ok &= sent == expect && out.trace.total_delivered() == expect && out.log.is_conserved();
        details.push(format!("{name}: {sent} sent, expected {expect}"));
    }
    pass_if(ok, details.join("; "))
}

fn s10_runs(alg: Algorithm) -> Vec<dapd_core::analysis::RunSummary> {
    (1..=10)
        .map(|seed| {
            let mut c = SimConfig::experiment_s10();
            c.seed = seed;
            c.algorithm = alg;
            let inst = c.problem.resolve(None, seed).unwrap();
            run_on(&c, inst).unwrap().summary
        })
        .collect()
}

fn c6_protocol() -> Outcome {
    let runs = s10_runs(Algorithm::Dapdsco);
    let hits = runs.iter().filter(|s| s.k_star.is_some_and(|k| k <= 2000)).count();
    let ks: Vec<Option<u64>> = runs.iter().map(|s| s.k_star).collect();
    pass_if(hits >= 7, format!("{hits}/10 seeds reach gap < 0.1 and violation < 0.05 by k = 2000 (need 7); k* {ks:?}"))
}

fn c7_ordering() -> Outcome {
    let d = s10_runs(Algorithm::Dapdsco);
    let s = s10_runs(Algorithm::SyncPd);
    let p = s10_runs(Algorithm::GradientPush);
    let k = |v: &[dapd_core::analysis::RunSummary]| median_k(&v.iter().map(|s| s.k_star).collect::<Vec<_>>());
    let msgs = |v: &[dapd_core::analysis::RunSummary]| median(&mut v.iter().map(|s| s.messages_sent as f64).collect::<Vec<_>>());
    let (kd, ks, kp) = (k(&d), k(&s), k(&p));
    let (md, mp) = (msgs(&d), msgs(&p));
    pass_if(
        kd < kp && md < mp,
        format!(
            "median k*: dapdsco {kd}, sync_pd {ks} (exempt), gradient_push {kp}; median messages: dapdsco {md}, gradient_push {mp}"
        ),
    )
}

/// Per-retailer grid search at step 0.01. Costs are positive, so for the
/// last inbound edge the cheapest feasible grid point is the smallest one
/// covering the remaining demand.
fn grid_optimum(p: &SupplyChainProblem) -> f64 {
    let mut by_retailer: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for e in p.edges() {
        by_retailer.entry(e.to.as_str()).or_default().push((e.cost.linear_coefficient(), e.capacity));
    }
    let step = 0.01;
    let grid = |u: f64| (0..=((u / step).floor() as usize)).map(move |i| i as f64 * step);
    let mut total = 0.0;
    for (r, edges) in by_retailer {
        let d = p.demands()[r];
        let mut best = f64::INFINITY;
        let (head, last) = edges.split_at(edges.len() - 1);
        let (cl, ul) = last[0];
        let mut visit = |prefix_flow: f64, prefix_cost: f64| {
            let need = (d - prefix_flow).max(0.0);
            let xl = (need / step - 1e-9).ceil().max(0.0) * step;
            if xl <= ul + 1e-12 {
                best = best.min(prefix_cost + cl * xl);
            }
        };
        match head {
            [] => visit(0.0, 0.0),
            [(c1, u1)] => grid(*u1).for_each(|x1| visit(x1, c1 * x1)),
            [(c1, u1), (c2, u2)] => {
                for x1 in grid(*u1) {
                    for x2 in grid(*u2) {
                        visit(x1 + x2, c1 * x1 + c2 * x2);
                    }
                }
            }
            _ => panic!("more than three inbound edges"),
        }
        total += best;
    }
    total
}

fn c8_oracles() -> Outcome {
    let mut worst_lp: f64 = 0.0;
    for seed in 0..50 {
        let p = random_small_dag(1000 + seed, 3, 3, 3.0).unwrap();
        let exact = exact_oracle_greedy(&p).unwrap().optimal_value;
        worst_lp = worst_lp.max((grid_optimum(&p) - exact).abs());
    }
    let mut worst_kkt: f64 = 0.0;
    for seed in 0..50 {
        let q = if seed % 2 == 0 {
            supply_chain_quadratic(seed, 2, 3, 5).unwrap()
        } else {
            random_quadratic(seed, 10, 4).unwrap()
        };
        let s = exact_oracle_kkt(&q).unwrap();
        let (a, b) = kkt_residuals(&q, &s.x, &s.lambda);
        worst_kkt = worst_kkt.max(a).max(b);
    }
    pass_if(
        worst_lp <= 0.05 && worst_kkt <= KKT_RESIDUAL_TOL,
        format!("max |greedy - grid| = {worst_lp:.4} (tol 0.05); max KKT residual = {worst_kkt:.2e} (tol {KKT_RESIDUAL_TOL:e})"),
    )
}

fn c9_robustness() -> Outcome {
    let run = |noisy: bool| -> f64 {
        let mut gaps: Vec<f64> = (1..=5)
            .map(|seed| {
                let (mut c, inst) = theory(seed);
                if noisy {
                    c.impairment.noise_cost = 0.1;
                    c.impairment.noise_demand = 0.1;
                } else {
                    c.impairment.drift.cost = DriftSchedule::ramp(c.iterations as u64, 0.1);
                }
                run_on(&c, inst).unwrap().summary.final_ergodic_gap
            })
            .collect();
        median(&mut gaps)
    };
    let (noise, drift) = (run(true), run(false));
    pass_if(
        noise < 0.1 && drift < 0.1,
        format!("median ergodic gap at K = 1e5: noise {noise:.4}, cost drift {drift:.4} (need < 0.1)"),
    )
}

fn c10_determinism() -> Outcome {
    let mut configs = vec![SimConfig::experiment_s10(), SimConfig::theory()];
    configs[1].iterations = 20_000;
    configs[1].impairment.loss_rate = 0.2;
    configs[1].impairment.activation_prob = 0.7;
    configs[1].impairment.noise_cost = 0.05;
    let mut ok = true;
    for c in &configs {
        let inst = c.problem.resolve(None, c.seed).unwrap();
        let a = run_on(c, inst.clone()).unwrap().trace.to_csv_bytes().unwrap();
        let b = run_on(c, inst).unwrap().trace.to_csv_bytes().unwrap();
        ok &= a == b;
    }
    let mut short = SimConfig::experiment_s10();
    short.iterations = 50;
    let inst = short.problem.resolve(None, short.seed).unwrap();
    let bytes = run_on(&short, inst).unwrap().trace.to_csv_bytes().unwrap();
    let golden = include_bytes!("golden/s10_k50.csv");
    let golden_ok = bytes.as_slice() == golden.as_slice();
    pass_if(ok && golden_ok, format!("repeat runs identical = {ok}; matches checked-in golden trace = {golden_ok}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 10] = [
        (1, "synchronous equivalence", c1_sync_equivalence, Duration::from_secs(5)),
        (2, "lyapunov descent", c2_lyapunov_descent, Duration::from_secs(30)),
        (3, "ergodic rate", c3_rate, Duration::from_secs(120)),
        (4, "summability", c4_summability, Duration::from_secs(60)),
        (5, "message accounting", c5_messages, Duration::from_secs(60)),
        (6, "experiment protocol", c6_protocol, Duration::from_secs(60)),
        (7, "baseline ordering", c7_ordering, Duration::from_secs(180)),
        (8, "oracle equivalence", c8_oracles, Duration::from_secs(30)),
        (9, "robustness", c9_robustness, Duration::from_secs(120)),
        (10, "determinism", c10_determinism, Duration::from_secs(120)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f, budget) in criteria {
        let t = Instant::now();
        let out = f();
        let elapsed = t.elapsed();
        let passed = out.passed && elapsed < budget;
        let note = if !passed && KNOWN_FAILURES.contains(&id) { " [known failure]" } else { "" };
        println!(
            "{} criterion {id} ({name}): {} [{:.2}s, budget {}s]{note}",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !passed && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
