use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const A_CSV: &str = "2,1,1,1\n1,3,1,1\n1,1,4,1\n1,1,1,5\n";

fn condineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condineq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn bound<'a>(report: &'a Value, name: &str, key: &str, value: u64) -> &'a Value {
    report["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == name && b["params"][key] == value)
        .unwrap_or_else(|| panic!("no {name} with {key}={value}"))
}

#[test]
fn bounds_on_a_reproduce_reference_values() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let out = condineq(&["bounds", p(&a), "--grid", "k=2;p=3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["matrix"], "A");
    assert!((r["log_det"].as_f64().unwrap().exp() - 74.0).abs() < 1e-9);
    let ss = bound(&r, "strong_szasz", "k", 2)["bound"].as_f64().unwrap();
    assert!((ss - 82.58).abs() < 0.01, "{ss}");
    let sz = bound(&r, "szasz", "k", 2)["bound"].as_f64().unwrap();
    assert!((sz - 97.32).abs() < 0.01, "{sz}");
    let kf = bound(&r, "ky_fan", "p", 3)["bound"].as_f64().unwrap();
    assert!((kf - 95.76).abs() < 0.01, "{kf}");
}

#[test]
fn json_slacks_recompute_exactly() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let out = condineq(&[
        "bounds",
        p(&a),
        "--format",
        "json",
        "--partition",
        "1,3|2,4",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    let entries = r["bounds"].as_array().unwrap();
    assert!(entries.len() > 20);
    for b in entries {
        let lb = b["log_bound"].as_f64().unwrap();
        let rl = b["reference_log"].as_f64().unwrap();
        assert_eq!(
            b["slack_log"].as_f64().unwrap().to_bits(),
            (lb - rl).to_bits(),
            "{b}"
        );
    }
}

#[test]
fn text_and_json_agree_to_four_decimals() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let args = [
        "bounds",
        p(&a),
        "--grid",
        "k=1..3;p=2..4",
        "--partition",
        "1,3|2,4",
    ];
    let text = stdout(&condineq(&args));
    let r = json(&condineq(&[&args[..], &["--format", "json"]].concat()));
    for b in r["bounds"].as_array().unwrap() {
        let params = b["params"].as_object().unwrap();
        let mut shown = Vec::new();
        for key in ["h", "p", "l", "k"] {
            if let Some(v) = params.get(key) {
                shown.push(format!("{key}={v}"));
            }
        }
        if params.contains_key("partition") {
            shown.push("partition=1,3|2,4".into());
        }
        let value = format!("{:.4}", b["bound"].as_f64().unwrap());
        let name = b["name"].as_str().unwrap();
        let found = text.lines().any(|line| {
            let cells: Vec<&str> = line
                .split("  ")
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .collect();
            cells.first() == Some(&name)
                && line.contains(&shown.join(" "))
                && cells.contains(&value.as_str())
        });
        assert!(found, "{name} {shown:?} {value} not in\n{text}");
    }
}

#[test]
fn identity_bounds_are_all_one() {
    let dir = TempDir::new().unwrap();
    let id = write(
        &dir,
        "id.json",
        r#"{"n": 3, "rows": [[1,0,0],[0,1,0],[0,0,1]]}"#,
    );
    let out = condineq(&["bounds", p(&id), "--format", "json", "--partition", "1|2,3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for b in json(&out)["bounds"].as_array().unwrap() {
        assert!((b["bound"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{b}");
        if b["name"] != "eigen_product" {
            assert_eq!(b["equality"], true, "{b}");
        }
    }
}

#[test]
fn leading_set_reorders() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let out = condineq(&[
        "bounds",
        p(&a),
        "--grid",
        "k=1",
        "--leading",
        "2,4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    let perm: Vec<u64> = r["permutation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(&perm[..2], &[2, 4]);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let asym = write(&dir, "asym.csv", "2,1\n0,2\n");
    let out = condineq(&["bounds", p(&asym)]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error: "));

    let ragged = write(&dir, "ragged.csv", "1,0\n0\n");
    let out = condineq(&["bounds", p(&ragged)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = condineq(&["bounds", p(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&out), 2);

    let a = write(&dir, "A.csv", A_CSV);
    assert_eq!(code(&condineq(&["bounds", p(&a), "--grid", "k=9"])), 2);
    assert_eq!(
        code(&condineq(&["bounds", p(&a), "--partition", "1,2|3"])),
        2
    );
    assert_eq!(
        code(&condineq(&[
            "eigen",
            p(&a),
            "--h",
            "2",
            "--p",
            "3",
            "--k",
            "3"
        ])),
        2
    );
    assert_eq!(code(&condineq(&["nonsense"])), 2);
}

#[test]
fn non_positive_definite_exits_3() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "indef.csv", "1,2\n2,1\n");
    let out = condineq(&["bounds", p(&m)]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn eigen_subcommand() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let out = condineq(&[
        "eigen",
        p(&a),
        "--h",
        "3",
        "--p",
        "3",
        "--k",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!((r["bound"].as_f64().unwrap() - 19.152).abs() < 0.005);
    assert!((r["eigen_product"].as_f64().unwrap() - 10.872).abs() < 0.005);
    assert_eq!(r["holds"], true);
    let text = stdout(&condineq(&[
        "eigen",
        p(&a),
        "--h",
        "3",
        "--p",
        "3",
        "--k",
        "2",
    ]));
    assert!(text.contains("16.5167"), "{text}");
}

#[test]
fn golden_passes() {
    let out = condineq(&["golden"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("9/9 reference values reproduced"));
    let r = json(&condineq(&["golden", "--format", "json"]));
    assert_eq!(r["checks"].as_array().unwrap().len(), 9);
}

#[test]
fn gaussian_instance_matches_determinant_domain() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "gauss.json",
        r#"{"kind": "gaussian", "rows": [[2,1,1,1],[1,3,1,1],[1,1,4,1],[1,1,1,5]]}"#,
    );
    let out = condineq(&[
        "submodular",
        p(&inst),
        "--k",
        "2",
        "--p",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["submodular"], true);
    let det = &r["han"][0]["determinant"];
    assert!((det["value"].as_f64().unwrap() - 74.0).abs() < 1e-9);
    assert!((det["inner"].as_f64().unwrap() - 82.58).abs() < 0.01);
    assert!((det["outer"].as_f64().unwrap() - 97.32).abs() < 0.01);
}

#[test]
fn modular_instance_attains_equality() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "mod.json",
        r#"{"kind": "modular", "weights": [1, 2, 3, 4]}"#,
    );
    let out = condineq(&[
        "submodular",
        p(&inst),
        "--partition",
        "1,3|2,4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = json(&out);
    for row in r["han"]
        .as_array()
        .unwrap()
        .iter()
        .chain(r["partitions"].as_array().unwrap())
    {
        assert_eq!(row["chain"]["inner"]["equality"], true, "{row}");
        assert_eq!(row["chain"]["outer"]["equality"], true, "{row}");
    }
}

#[test]
fn coverage_instance_text() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "cover.json",
        r#"{"kind": "set_cover", "label": "cover", "weights": [1, 1, 2], "sets": [[1, 2], [2, 3], [3]]}"#,
    );
    let out = condineq(&["submodular", p(&inst)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("instance cover (n = 3)"), "{text}");
    assert!(text.contains("chains hold: yes"));
}

#[test]
fn invalid_instances_exit_2() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [
        (
            "neg.json",
            r#"{"kind": "graph_cut", "n": 2, "edges": [[1, 2, -1]]}"#,
        ),
        (
            "pmf.json",
            r#"{"kind": "discrete_entropy", "alphabet": [2, 2], "probs": [0.5, 0.5]}"#,
        ),
        ("kind.json", r#"{"kind": "mystery"}"#),
        ("trunc.json", r#"{"kind": "modular", "weights": [1,"#),
    ] {
        let inst = write(&dir, name, body);
        let out = condineq(&["submodular", p(&inst)]);
        assert_eq!(code(&out), 2, "{name}: {}", stderr(&out));
    }
}

#[test]
fn oversized_ground_set_exits_4() {
    let dir = TempDir::new().unwrap();
    let weights = vec!["1"; 20].join(",");
    let inst = write(
        &dir,
        "big.json",
        &format!(r#"{{"kind": "modular", "weights": [{weights}]}}"#),
    );
    let out = condineq(&["submodular", p(&inst)]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(
        stderr(&out).contains("exceeds brute-force cap 16"),
        "{}",
        stderr(&out)
    );
    let small = condineq(&["submodular", p(&inst), "--cap", "18"]);
    assert_eq!(code(&small), 4);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "A.csv", A_CSV);
    let target = dir.path().join("report.json");
    let out = condineq(&[
        "bounds",
        p(&a),
        "--grid",
        "k=2;p=3",
        "--format",
        "json",
        "--out",
        p(&target),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["n"], 4);
}

#[test]
fn verify_suites_pass() {
    let out = condineq(&["verify", "--trials", "20", "--max-n", "5", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for suite in ["submodular", "determinant", "equality", "strictness"] {
        assert!(text.contains(&format!("PASS {suite}:")), "{text}");
    }
    let r = json(&condineq(&[
        "verify",
        "determinant",
        "--trials",
        "5",
        "--format",
        "json",
    ]));
    assert_eq!(r[0]["suite"], "determinant");
    assert_eq!(r[0]["failures"].as_array().unwrap().len(), 0);
    assert_eq!(code(&condineq(&["verify", "--max-n", "0"])), 2);
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&condineq(&["--help"])), 0);
    assert_eq!(code(&condineq(&["--version"])), 0);
}
