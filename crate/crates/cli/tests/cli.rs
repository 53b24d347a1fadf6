use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dapd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dapd"))
        .args(args)
        .current_dir(dir)
        .env_remove("DAPD_OUTPUT_ROOT")
        .output()
        .expect("spawn dapd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_THEORY: &str = r#"
preset = "theory"
iterations = 2000
"#;

#[test]
fn generate_three_tier_has_ten_nodes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dapd(tmp.path(), &["generate", "--kind", "three-tier", "-o", "p.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("10 nodes"));
    assert!(stdout(&o).contains("slater: strictly feasible"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(v["kind"], "dag");
    assert_eq!(v["nodes"].as_array().unwrap().len(), 10);
}

#[test]
fn generate_fig1_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dapd(tmp.path(), &["generate", "--kind", "fig1", "-o", "f.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("7 nodes, 6 edges"));
}

#[test]
fn generate_is_byte_deterministic_and_refuses_overwrite() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(dapd(tmp.path(), &["generate", "--kind", "quadratic", "--seed", "9", "-o", "a.json"]).status.success());
    assert!(dapd(tmp.path(), &["generate", "--kind", "quadratic", "--seed", "9", "-o", "b.json"]).status.success());
    assert_eq!(fs::read(tmp.path().join("a.json")).unwrap(), fs::read(tmp.path().join("b.json")).unwrap());
    let again = dapd(tmp.path(), &["generate", "--kind", "quadratic", "-o", "a.json"]);
    assert_eq!(again.status.code(), Some(1));
    assert!(stderr(&again).contains("--force"));
    assert!(dapd(tmp.path(), &["generate", "--kind", "quadratic", "-o", "a.json", "--force"]).status.success());
}

#[test]
fn generate_from_spec_file_and_bad_spec() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.toml"), "kind = \"small_dag\"\nn_retailers = 4\nmax_inbound = 2\nmax_capacity = 2.0\n").unwrap();
    let o = dapd(tmp.path(), &["generate", "--spec", "g.toml", "-o", "s.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("4 retailers"));
    fs::write(tmp.path().join("bad.toml"), "kind = \"three_tier\"\nn_s = 0\nn_w = 1\nn_r = 1\ncost_range = [0.5, 2.0]\ndemand_range = [0.5, 1.0]\n").unwrap();
    let o = dapd(tmp.path(), &["generate", "--spec", "bad.toml", "-o", "x.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("x.json").exists());
}

#[test]
fn run_writes_the_four_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dapd(tmp.path(), &["run", "--preset", "experiment-s10", "--seed", "3", "-o", "r"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["config.toml", "problem.json", "trace.csv", "summary.json"] {
        assert!(tmp.path().join("r").join(f).exists(), "{f}");
    }
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("r/summary.json")).unwrap()).unwrap();
    for key in ["k_star", "final_gap", "final_violation", "messages_sent", "messages_dropped", "messages_delivered"] {
        assert!(s.get(key).is_some(), "{key}");
    }
    assert_eq!(s["seed"], 3);
    assert_eq!(s["messages_sent"], 2000 * 18);
    let rows = fs::read_to_string(tmp.path().join("r/trace.csv")).unwrap().lines().count();
    assert_eq!(rows, 2002);
}

#[test]
fn run_refuses_existing_directory() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), SMALL_THEORY).unwrap();
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]).status.success());
    let o = dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r", "--force"]).status.success());
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dapd"))
        .args(["run", "--preset", "experiment-s10", "--iterations", "50"])
        .current_dir(tmp.path())
        .env("DAPD_OUTPUT_ROOT", "out")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("out/experiment-s10-dapdsco-s1/trace.csv").exists());
}

#[test]
fn sync_pd_and_unimpaired_dapdsco_traces_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"
preset = "theory"
iterations = 1000
[impairment]
delay_cap_coeff = 0.0
max_buffer = 0
"#;
    fs::write(tmp.path().join("c.toml"), cfg).unwrap();
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "--algorithm", "dapdsco", "-o", "a"]).status.success());
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "--algorithm", "sync_pd", "-o", "b"]).status.success());
    assert_eq!(fs::read(tmp.path().join("a/trace.csv")).unwrap(), fs::read(tmp.path().join("b/trace.csv")).unwrap());
}

#[test]
fn missing_problem_file_leaves_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "preset = \"theory\"\n[problem]\npath = \"nope.json\"\n").unwrap();
    let o = dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("r").exists());
}

#[test]
fn config_error_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "preset = \"theory\"\n[impairment]\nloss_rat = 0.1\n").unwrap();
    let o = dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("loss_rat"), "{}", stderr(&o));
}

#[test]
fn problem_file_run_is_regenerable_from_its_directory() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(dapd(tmp.path(), &["generate", "--kind", "small-dag", "-o", "in/p.json"]).status.success());
    fs::write(tmp.path().join("in/c.toml"), "preset = \"theory\"\niterations = 500\n[problem]\npath = \"p.json\"\n").unwrap();
    assert!(dapd(tmp.path(), &["run", "-c", "in/c.toml", "-o", "r1"]).status.success());
    let o = dapd(tmp.path(), &["run", "-c", "r1/config.toml", "-o", "r2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(tmp.path().join("r1/trace.csv")).unwrap(), fs::read(tmp.path().join("r2/trace.csv")).unwrap());
}

#[test]
fn verify_reports_each_check_and_writes_analysis() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "preset = \"theory\"\niterations = 10000\n").unwrap();
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]).status.success());
    let o = dapd(tmp.path(), &["verify", "r"]);
    let out = stdout(&o);
    assert!(out.contains("PASS lyapunov_descent"), "{out}");
    assert!(out.contains("rate_slope"));
    assert!(out.contains("error_series"));
    // Exit code follows the checks: 0 if all passed, 2 otherwise.
    let all = !out.contains("FAIL");
    assert_eq!(o.status.code(), Some(if all { 0 } else { 2 }));
    let a: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("r/analysis.json")).unwrap()).unwrap();
    assert_eq!(a["checks"].as_array().unwrap().len(), 3);
    assert!(a["constants"]["G"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_constant_steps_is_non_summable() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(dapd(tmp.path(), &["run", "--preset", "experiment-s10", "-o", "r"]).status.success());
    let o = dapd(tmp.path(), &["verify", "r"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL error_series"));
    assert!(stdout(&o).contains("non-summable"));
}

#[test]
fn verify_rejects_truncated_and_mismatched_traces() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), SMALL_THEORY).unwrap();
    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r"]).status.success());
    let trace = tmp.path().join("r/trace.csv");
    let text = fs::read_to_string(&trace).unwrap();
    let cut = &text[..text.len() / 2];
    fs::write(&trace, cut).unwrap();
    let o = dapd(tmp.path(), &["verify", "r"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));

    assert!(dapd(tmp.path(), &["run", "-c", "c.toml", "-o", "r", "--force"]).status.success());
    assert!(dapd(tmp.path(), &["generate", "--kind", "three-tier", "-o", "r/problem.json", "--force"]).status.success());
    let o = dapd(tmp.path(), &["verify", "r"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("flows"), "{}", stderr(&o));
}

#[test]
fn compare_rows_and_medians() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dapd(tmp.path(), &["compare", "--preset", "experiment-s10", "-o", "cmp.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(tmp.path().join("cmp.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 44);
    assert_eq!(rows.iter().filter(|r| &r[1] == "median").count(), 4);
    let median = |alg: &str, col: usize| rows.iter().find(|r| &r[0] == alg && &r[1] == "median").unwrap()[col].to_string();
    assert_eq!(median("dapdsco", 5), "36000");
    assert!(median("gradient_push", 5).parse::<f64>().unwrap() > 36000.0);
}

#[test]
fn compare_needs_two_algorithms() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dapd(tmp.path(), &["compare", "--preset", "experiment-s10", "--algorithms", "dapdsco"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sync_message_count_matches_formula() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"
preset = "theory"
iterations = 300
[impairment]
delay_cap_coeff = 0.0
max_buffer = 0
"#;
    fs::write(tmp.path().join("c.toml"), cfg).unwrap();
    let o = dapd(tmp.path(), &["compare", "-c", "c.toml", "--algorithms", "dapdsco,sync_pd", "--seeds", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // fig1 network: 6 edges, 4 retailers.
    for line in stdout(&o).lines().skip(1) {
        assert_eq!(line.split(',').nth(5).unwrap(), (300 * (6 + 4)).to_string(), "{line}");
    }
}

#[test]
fn sweep_grid_and_cap() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), SMALL_THEORY).unwrap();
    let o = dapd(
        tmp.path(),
        &["sweep", "-c", "c.toml", "--grid", "loss=0,0.1,0.3", "--grid", "gamma=0,0.3,0.45", "--seeds", "1-2", "-o", "sw"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let cells = fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(cells.lines().count(), 10);
    let runs = fs::read_to_string(tmp.path().join("sw/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 19);
    let o = dapd(tmp.path(), &["sweep", "-c", "c.toml", "--grid", "loss=0,0.1,0.3", "--max-cells", "2", "-o", "sw2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cap"));
    let o = dapd(tmp.path(), &["sweep", "-c", "c.toml", "--grid", "speed=1", "-o", "sw3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dapd(tmp.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(dapd(tmp.path(), &["run", "--algorithm", "simplex", "-o", "r"]).status.code(), Some(1));
    assert_eq!(dapd(tmp.path(), &["--help"]).status.code(), Some(0));
}
