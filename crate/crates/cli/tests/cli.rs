use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfix"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const MAP: &str = r#"{"domain":{"norm":"l2","shape":{"box":{"lo":[-1,-1],"hi":[1,1]}}},
    "map":{"node":"finite_union","maps":[
      {"A":[[0.4,0.1],[-0.1,0.3]],"b":[0.3,0.1]},
      {"A":[[0.2,0],[0,0.2]],"b":[-0.4,-0.6]}]}}"#;

#[test]
fn hausdorff_values() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(tmp.path(), "a.json", r#"{"points":[[0,0],[1,0]]}"#);
    let a2 = write(tmp.path(), "a2.json", r#"{"points":[[1,0],[0,0]]}"#);
    let b = write(tmp.path(), "b.json", r#"{"points":[[0,1],[1,1]]}"#);
    let one = write(tmp.path(), "one.json", r#"{"points":[[0,0]]}"#);
    let two = write(tmp.path(), "two.json", r#"{"points":[[1,0]]}"#);

    let out = run(&["hausdorff", &a, &a2]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["hausdorff"], 0.0);
    assert_eq!(json(&run(&["hausdorff", &one, &two]))["result"]["hausdorff"], 1.0);
    assert_eq!(json(&run(&["hausdorff", &a, &b]))["result"]["hausdorff"], 1.0);
    let cfg = json(&run(&["--seed", "5", "hausdorff", &a, &b]))["config"].clone();
    assert_eq!(cfg["seed"], 5);
    assert_eq!(cfg["command"], "hausdorff");
}

#[test]
fn projection_ties_and_tie_error() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(tmp.path(), "a.json", r#"{"points":[[0,0],[1,0]]}"#);
    let r = json(&run(&["project", &a, "--point", "0.5,1"]))["result"].clone();
    assert_eq!(r["unique"], false);
    assert_eq!(r["tie_diameter"], 1.0);
    assert_eq!(r["chosen"], serde_json::json!([0.0, 0.0]));

    // The image {(0,0), (1,0)} is equidistant from (0.5, 1).
    let map = write(
        tmp.path(),
        "tie.json",
        r#"{"domain":{"norm":"l2","shape":{"box":{"lo":[-2,-2],"hi":[2,2]}}},
            "map":{"node":"constant","points":[[0,0],[1,0]]}}"#,
    );
    assert_eq!(run(&["trajectory", &map, "--start", "0.5,1"]).status.code(), Some(0));
    let out = run(&["--tie-break", "error", "trajectory", &map, "--start", "0.5,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["terminated_by"], "tie_error");
}

#[test]
fn constant_map_reaches_its_value() {
    let tmp = tempfile::tempdir().unwrap();
    let map = write(
        tmp.path(),
        "c.json",
        r#"{"domain":{"norm":"l2","shape":{"box":{"lo":[-1,-1],"hi":[1,1]}}},
            "map":{"node":"constant","points":[[0.5,0]]}}"#,
    );
    let r = json(&run(&["trajectory", &map, "--start", "0,0"]))["result"].clone();
    assert_eq!(r["terminated_by"], "fixed_point");
    assert_eq!(r["steps"].as_array().unwrap().len(), 2);
    assert_eq!(r["steps"][1]["point"], serde_json::json!([0.5, 0.0]));
}

#[test]
fn chain_builds_a_regular_map() {
    let tmp = tempfile::tempdir().unwrap();
    let map = write(tmp.path(), "map.json", MAP);
    let saved = tmp.path().join("g.json").display().to_string();
    let out = run(&[
        "chain",
        &map,
        "--start",
        "0.8,-0.9",
        "--n",
        "3",
        "--r",
        "0.5",
        "--save-map",
        &saved,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out)["result"].clone();
    assert_eq!(rep["verified"], true);
    let traj = json(&run(&[
        "trajectory",
        &saved,
        "--start",
        "0.8,-0.9",
        "--steps",
        "3",
        "--fp-tol",
        "0",
    ]));
    assert_eq!(traj["result"]["regular"], true);
    assert_eq!(run(&["eval", &saved, "--point", "0.1,0.1"]).status.code(), Some(0));
    assert_eq!(run(&["verify", &saved, "--suite", "metric"]).status.code(), Some(0));

    let csv = run(&[
        "--format", "csv", "chain", &map, "--start", "0.8,-0.9", "--n", "3", "--r", "0.5",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("step,x1,x2,kind,delta,sigma,eps,eps_prime,lip_after"));
}

#[test]
fn porosity_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = write(tmp.path(), "pair.json", r#"{"points":[[-0.5,0.5],[0.5,0.5]]}"#);
    let out = run(&["--samples", "200", "porosity", &pair, "--point", "0,0", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out)["result"].clone();
    assert_eq!(r["total_violations"], 0);
    assert_eq!(r["r_grid"].as_array().unwrap().len(), 10);
    // A singleton has no projection tie to split.
    let single = write(tmp.path(), "one.json", r#"{"points":[[0.5,0.5]]}"#);
    assert_eq!(
        run(&["porosity", &single, "--point", "0,0", "--n", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let map = write(tmp.path(), "map.json", MAP);
    for suite in ["metric", "lipschitz", "construction", "stability", "all"] {
        let out = run(&["--samples", "200", "verify", &map, "--suite", suite]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn bad_inputs_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let map = write(tmp.path(), "map.json", MAP);
    let lied = write(
        tmp.path(),
        "lied.json",
        r#"{"domain":{"norm":"l2","shape":{"box":{"lo":[-1,-1],"hi":[1,1]}}},
            "map":{"node":"finite_union","certified_lip":0.1,"maps":[{"A":[[0.5,0],[0,0.5]],"b":[0,0]}]}}"#,
    );
    let broken = write(tmp.path(), "broken.json", "{\"points\": [[0, 0]");
    let expansive = write(
        tmp.path(),
        "big.json",
        r#"{"domain":{"norm":"l2","shape":{"box":{"lo":[-1,-1],"hi":[1,1]}}},
            "map":{"node":"finite_union","maps":[{"A":[[2,0],[0,2]],"b":[0,0]}]}}"#,
    );
    assert_eq!(run(&["eval", &lied, "--point", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["hausdorff", &broken, &broken]).status.code(), Some(2));
    assert_eq!(run(&["eval", &expansive, "--point", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["eval", &map, "--point", "5,5"]).status.code(), Some(2));
    assert_eq!(run(&["eval", &map, "--point", "0,x"]).status.code(), Some(2));
    assert_eq!(run(&["eval", &map, "--point", "0,0,0"]).status.code(), Some(2));
    assert_eq!(
        run(&["chain", &map, "--start", "0.8,-0.9", "--n", "2", "--r", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["eval", "/nonexistent/map.json", "--point", "0,0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run_env(&["eval", &map, "--point", "0,0"], "HYPERFIX_THREADS", "zero")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_env(&["eval", &map, "--point", "0,0"], "HYPERFIX_THREADS", "2")
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn norm_override() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(tmp.path(), "a.json", r#"{"points":[[0,0]]}"#);
    let b = write(tmp.path(), "b.json", r#"{"points":[[1,1]]}"#);
    assert_eq!(
        json(&run(&["--norm", "l1", "hausdorff", &a, &b]))["result"]["hausdorff"],
        2.0
    );
    assert_eq!(
        json(&run(&["--norm", "max", "hausdorff", &a, &b]))["result"]["hausdorff"],
        1.0
    );
    assert_eq!(run(&["--norm", "l7", "hausdorff", &a, &b]).status.code(), Some(2));
}
