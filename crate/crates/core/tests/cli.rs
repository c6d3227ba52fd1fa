use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn orthoinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoinv"))
        .args(args)
        .env_remove("ORTHOINV_MAX_POINTS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn check_schema(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{value:#}");
}

fn json_of(args: &[&str], schema: &str) -> Value {
    let o = orthoinv(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    check_schema(schema, &v);
    v
}

#[test]
fn dim_text_and_json() {
    let o = orthoinv(&["dim", "--r", "3", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "5\n");
    let v = json_of(&["dim", "--r", "8", "--m", "6", "--json"], "dim");
    assert_eq!(v["dim"], "284615877731708760168866");
    let v = json_of(&["dim", "--r", "3", "--d", "7", "--json"], "dim");
    assert_eq!(v["dim"], "0");
}

#[test]
fn dim_rejects_zero_factors() {
    let o = orthoinv(&["dim", "--r", "0", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(
        err.starts_with("error: kind=invalid_argument message="),
        "{err}"
    );
}

#[test]
fn table_text_layout() {
    let o = orthoinv(&["table", "--rmax", "3", "--mmax", "3"]);
    assert_eq!(
        stdout(&o),
        "r\\m  1  2   3\n  1  1  1   1\n  2  1  2   3\n  3  1  5  16\n"
    );
    let v = json_of(&["table", "--rmax", "8", "--mmax", "6", "--json"], "table");
    assert_eq!(v["cells"].as_array().unwrap().len(), 48);
    assert_eq!(v["cells"][29]["dim"], "253588562985");
}

#[test]
fn orbits_and_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(
        &[
            "orbits",
            "--r",
            "3",
            "--m",
            "2",
            "--json",
            "--dot",
            dir.path().to_str().unwrap(),
        ],
        "orbits",
    );
    assert_eq!(v["count"], 5);
    let sizes: u64 = v["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["orbit_size"].as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(sizes, 27);
    for k in 1..=5 {
        let dot = std::fs::read_to_string(dir.path().join(format!("orbit_{k}.dot"))).unwrap();
        assert!(dot.starts_with(&format!("graph orbit_{k} {{")));
        assert_eq!(dot.matches(" -- ").count(), 6);
    }
    let text = stdout(&orthoinv(&["orbits", "--r", "2", "--m", "2"]));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn invariant_and_evaluation() {
    let v = json_of(
        &[
            "invariant",
            "--r",
            "3",
            "--m",
            "2",
            "--orbit",
            "5",
            "--dims",
            "2,2,2",
            "--json",
        ],
        "invariant",
    );
    assert_eq!(
        v["tuple"],
        json!([[[1, 2], [3, 4]], [[1, 3], [2, 4]], [[1, 4], [2, 3]]])
    );

    let dir = tempfile::tempdir().unwrap();
    let tensor = dir.path().join("x.json");
    let mut entries = vec!["0"; 8];
    for i in [0, 3, 5, 6] {
        entries[i] = "1";
    }
    let x = json!({"dims": [2, 2, 2], "entries": entries});
    check_schema("tensor", &x);
    std::fs::write(&tensor, x.to_string()).unwrap();
    let args = [
        "invariant",
        "--r",
        "3",
        "--m",
        "2",
        "--orbit",
        "5",
        "--dims",
        "2,2,2",
        "--eval",
        tensor.to_str().unwrap(),
    ];
    let o = orthoinv(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("value=8\n"), "{}", stdout(&o));

    let o = orthoinv(&["invariant", "--r", "3", "--m", "2", "--orbit", "6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = [
        "verify", "--r", "3", "--m", "2", "--dims", "2,2,2", "--trials", "20", "--json",
    ];
    let v = json_of(&args, "verify");
    assert_eq!(v["pass"], true);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(stdout(&orthoinv(&args)), stdout(&orthoinv(&args)));

    let o = orthoinv(&[
        "verify", "--r", "3", "--m", "2", "--dims", "2,2,2", "--trials", "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("status=pass"));
}

#[test]
fn verify_rank_deficit_fails() {
    // at n = 1 every invariant is a multiple of x^{2m}
    let v = orthoinv(&[
        "verify",
        "--r",
        "2",
        "--m",
        "2",
        "--dims",
        "1,1",
        "--trials",
        "1",
        "--rank-samples",
        "4",
        "--json",
    ]);
    assert_eq!(v.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&v)).unwrap();
    check_schema("verify", &v);
    assert_eq!(v["rank"], 1);
    let ok = json_of(
        &[
            "verify",
            "--r",
            "2",
            "--m",
            "2",
            "--dims",
            "4,4",
            "--trials",
            "2",
            "--rank-samples",
            "4",
            "--json",
        ],
        "verify",
    );
    assert_eq!(ok["rank"], 2);
}

#[test]
fn trees_subcommand() {
    let o = orthoinv(&["trees", "--matching", "(1 4)(2 3)(5 8)(6 7)"]);
    assert_eq!(stdout(&o), "(((1,4),(2,3)),5);\n");
    let v = json_of(
        &["trees", "--newick", "((1,(2,7)),(4,(3,(5,6))));", "--json"],
        "tree",
    );
    assert_eq!(v["matching"], "(1 8)(2 7)(3 10)(4 11)(5 6)(9 12)");

    let dir = tempfile::tempdir().unwrap();
    let forest = dir.path().join("f.json");
    let input = json_of(
        &["trees", "--matching", "(1 3)(2 5)(4 6)", "--json"],
        "tree",
    )["newick"]
        .clone();
    let second = json_of(
        &["trees", "--matching", "(1 3)(2 4)(5 6)", "--json"],
        "tree",
    )["newick"]
        .clone();
    let third = json_of(
        &["trees", "--matching", "(1 6)(2 4)(3 5)", "--json"],
        "tree",
    )["newick"]
        .clone();
    std::fs::write(&forest, json!([input, second, third]).to_string()).unwrap();
    let acted = json_of(
        &[
            "trees",
            "--act",
            "(1 3 5)(2 4)(6)",
            "--forest",
            forest.to_str().unwrap(),
            "--json",
        ],
        "forest",
    );
    let expected: Vec<Value> = ["(1 4)(2 6)(3 5)", "(1 6)(2 4)(3 5)", "(1 5)(2 4)(3 6)"]
        .iter()
        .map(|m| json_of(&["trees", "--matching", m, "--json"], "tree")["newick"].clone())
        .collect();
    assert_eq!(acted, Value::Array(expected));

    let o = orthoinv(&["trees", "--newick", "((1,2),4);"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: kind=malformed"));
}

#[test]
fn cap_override_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_orthoinv"))
        .args(["orbits", "--r", "2", "--m", "3"])
        .env("ORTHOINV_MAX_POINTS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: kind=cap_exceeded"));
    let o = orthoinv(&[
        "verify", "--r", "3", "--m", "4", "--dims", "8,8,8", "--trials", "1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = stdout(&orthoinv(&[
        "--threads",
        "1",
        "orbits",
        "--r",
        "3",
        "--m",
        "3",
    ]));
    let b = stdout(&orthoinv(&[
        "--threads",
        "4",
        "orbits",
        "--r",
        "3",
        "--m",
        "3",
    ]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 16);
}
