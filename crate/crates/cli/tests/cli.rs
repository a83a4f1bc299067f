use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gwql(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gwql"));
    cmd.args(args).env_remove("GWQL_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("GWQL_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("invalid JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn without_timing(mut v: Value) -> Value {
    if let Some(m) = v.as_object_mut() {
        m.remove("seconds");
        for (_, x) in m.iter_mut() {
            *x = without_timing(x.take());
        }
    } else if let Some(a) = v.as_array_mut() {
        for x in a.iter_mut() {
            *x = without_timing(x.take());
        }
    }
    v
}

#[test]
fn bounds_check() {
    let out = gwql(
        &[
            "bounds", "check", "--pair", "P4:5", "--genus", "2", "--degree", "1",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "true");
    let out = gwql(
        &[
            "bounds", "check", "--pair", "P4:5", "--genus", "3", "--degree", "0", "--json",
        ],
        None,
    );
    let v = json(&out);
    assert_eq!(v["vanishing_bound"], false);
    assert_eq!(v["degree_condition_modified"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gwql(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(
        gwql(&["bounds", "check", "--pair", "Q4"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        gwql(&["relation", "check", "--id", "rel9"], None).status.code(),
        Some(2)
    );
}

#[test]
fn computation_errors_exit_1() {
    let out = gwql(
        &[
            "bounds", "plan", "--pair", "P4:5", "--genus", "3", "--degree", "0",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let out = gwql(
        &[
            "invariant",
            "compute",
            "--space",
            "P2",
            "--genus",
            "2",
            "--degree",
            "1",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quintic_lines() {
    let out = gwql(
        &[
            "--json",
            "invariant",
            "compute",
            "--space",
            "P4",
            "--twist",
            "5:0",
            "--degree",
            "1",
        ],
        None,
    );
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["value"]["0"], "2875/1");
    assert_eq!(v["graph_count"], 10);
    let key = v["key"].as_str().unwrap();
    let again = json(&gwql(&["--json", "invariant", "compute", "--key", key], None));
    assert_eq!(again["value"], v["value"]);
    let oracle = json(&gwql(
        &[
            "--json",
            "invariant",
            "oracle",
            "--space",
            "P4",
            "--twist",
            "5",
            "--degree",
            "1",
        ],
        None,
    ));
    assert_eq!(oracle["value"], "2875/1");
}

#[test]
fn cache_cold_and_warm_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--json",
        "invariant",
        "compute",
        "--space",
        "P2",
        "--twist",
        "-2:1:inverse",
        "--genus",
        "1",
        "--degree",
        "1",
        "--insertion",
        "2*H;kernel=2,4",
    ];
    let cold = gwql(&args, Some(dir.path()));
    let warm = gwql(&args, Some(dir.path()));
    assert!(cold.status.success() && warm.status.success());
    assert_eq!(without_timing(json(&cold)), without_timing(json(&warm)));
    let list = json(&gwql(&["--json", "cache", "list"], Some(dir.path())));
    assert_eq!(list["entries"].as_array().unwrap().len(), 1);
    let key = json(&cold)["key"].as_str().unwrap().to_string();
    let got = json(&gwql(
        &["--json", "cache", "get", "--key", &key],
        Some(dir.path()),
    ));
    assert_eq!(got["value"], json(&cold)["value"]);
    let cleared = json(&gwql(&["--json", "cache", "clear"], Some(dir.path())));
    assert_eq!(cleared["removed"], 1);
    assert_eq!(gwql(&["cache", "list"], None).status.code(), Some(1));
}

#[test]
fn relations() {
    let out = gwql(
        &[
            "--json", "relation", "check", "--id", "rel2", "--X", "P2", "--Ddeg", "2", "--beta", "1",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["cases"][0]["equal"], true);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cases.json");
    std::fs::write(
        &file,
        r#"[{"relation":"fano","N":3,"d_degree":4,"beta_degree":1},
            {"relation":"rel2","N":2,"d_degree":1,"beta_degree":1}]"#,
    )
    .unwrap();
    let out = gwql(
        &["--json", "relation", "suite", "--file", file.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["cases"][0]["equal"], true);
    assert_eq!(v["cases"][0]["lhs"]["-1"], "-6/1");
    assert_eq!(v["cases"][1]["equal"], false);
}

#[test]
fn masterspace_and_hypergraphs() {
    let v = json(&gwql(&["--json", "masterspace", "data", "--L", "1"], None));
    let degs: Vec<i64> = v["loci"]
        .as_array()
        .unwrap()
        .iter()
        .skip(1)
        .map(|l| l["normal_bundle"][0]["degree"].as_i64().unwrap())
        .collect();
    assert_eq!(degs, vec![-4, -1]);
    let v = json(&gwql(
        &[
            "--json",
            "hypergraphs",
            "enumerate",
            "--genus",
            "2",
            "--count-only",
        ],
        None,
    ));
    assert_eq!(v["zero_edge_count"], 3);
    assert!(v.get("hypergraphs").is_none());
    let full = json(&gwql(
        &["--json", "hypergraphs", "enumerate", "--genus", "2"],
        None,
    ));
    assert_eq!(
        full["hypergraphs"].as_array().unwrap().len() as u64,
        v["count"].as_u64().unwrap()
    );
    assert_eq!(
        gwql(&["hypergraphs", "enumerate", "--genus", "1"], None)
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn graphs_and_hodge_table() {
    let v = json(&gwql(
        &["--json", "graphs", "enumerate", "--space", "P1", "--degree", "2"],
        None,
    ));
    assert_eq!(v["count"], 3);
    let v = json(&gwql(
        &["--json", "hodge-table", "--genus", "1", "--max-n", "1"],
        None,
    ));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["value"] == "1/24"));
}
