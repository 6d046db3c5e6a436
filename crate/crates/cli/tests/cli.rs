use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kmsdyn"));
    cmd.args(args).env_remove("KMSDYN_ATOM_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn error_of(out: &Output) -> (i32, String) {
    let v: Value = serde_json::from_slice(&out.stderr).expect("json error on stderr");
    (out.status.code().expect("exit code"), v["error"]["kind"].as_str().expect("kind").to_string())
}

#[test]
fn analyze_power_map() {
    let v = json_ok(&["rat", "analyze", "--map", "z^2"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["report"]["degree"], 2);
    assert_eq!(v["report"]["exceptional"]["case"], "TwoFixed");
    let pts: Vec<&Value> = v["report"]["branch_points"].as_array().unwrap().iter().map(|b| &b["point"]).collect();
    assert_eq!(pts.len(), 2);
    assert!(pts.contains(&&Value::from("inf")));
}

#[test]
fn inverse_square_weights() {
    let v = json_ok(&["rat", "kms", "--map", "1/z^2", "--beta", "1.0"]);
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    let e = 1f64.exp();
    for s in states {
        let atoms = s["atoms"].as_array().unwrap();
        let anchor_w = atoms.iter().find(|a| a["point"] == s["anchor"]).unwrap()["weight"].as_f64().unwrap();
        assert!((anchor_w - e / (e + 1.0)).abs() < 1e-12);
        assert!(s["k1"]["max_residual"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn twisted_gasket_classification() {
    let v = json_ok(&["ifs", "classify", "--preset", "sierpinski-twisted", "--beta", "1.5"]);
    assert_eq!(v["report"]["counts"]["finite"], 3);
    let v = json_ok(&["ifs", "classify", "--preset", "sierpinski-twisted", "--critical"]);
    assert_eq!(v["report"]["counts"]["infinite"], 1);
}

#[test]
fn phase_grid_and_witness() {
    let v = json_ok(&["rat", "phase", "--map", "z^2+1", "--beta-grid", "0.3:1.5:0.3"]);
    assert_eq!(v["grid"].as_array().unwrap().len(), 5);
    assert_eq!(v["critical"]["counts"]["infinite"], 1);
    let v = json_ok(&["rat", "witness", "--map", "z^2", "--point", "1", "--beta", "0.5"]);
    assert!(v["witness"]["mass_bound"].as_f64().unwrap() < 0.1);
    let v = json_ok(&["rat", "lyubich", "--map", "z^2", "--seed", "-1+i", "--iters", "6"]);
    assert_eq!(v["atom_count"], 64);
}

#[test]
fn output_is_byte_stable() {
    let args = ["ifs", "hutchinson", "--preset", "sierpinski", "--chaos", "20000", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let atoms = dir.path().join("atoms");
    let res = run(&[
        "ifs",
        "kms",
        "--preset",
        "tent",
        "--beta",
        "2",
        "--depth",
        "6",
        "--out",
        out.to_str().unwrap(),
        "--atoms-dir",
        atoms.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(res.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 1);
    let csv = std::fs::read_to_string(atoms.join("state_0.csv")).unwrap();
    assert!(csv.starts_with("x,y,weight"));
    assert_eq!(csv.lines().count(), 1 + 127);

    let res = run(&[
        "rat",
        "lyubich",
        "--map",
        "z^2+1",
        "--seed",
        "2",
        "--iters",
        "3",
        "--atoms-dir",
        atoms.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let csv = std::fs::read_to_string(atoms.join("lyubich.csv")).unwrap();
    assert!(csv.starts_with("re,im,is_inf,weight,level"));
}

#[test]
fn custom_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tent.json");
    std::fs::write(&path, r#"{"dim": 1, "maps": [{"linear": 0.5, "offset": 0}, {"linear": -0.5, "offset": 1}]}"#)
        .unwrap();
    let v = json_ok(&["ifs", "analyze", "--system", path.to_str().unwrap()]);
    assert_eq!(v["report"]["branch"]["branch_points"][0]["x"].as_f64(), Some(0.5));
    assert_eq!(v["orbit_condition"]["certified"], true);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let one_map = dir.path().join("one.json");
    std::fs::write(&one_map, r#"{"dim": 1, "maps": [{"linear": 0.5, "offset": 0}]}"#).unwrap();
    let cases: Vec<(Output, i32, &str)> = vec![
        (run(&["rat", "analyze", "--map", "z^2+"]), 13, "SyntaxError"),
        (run(&["rat", "analyze", "--map", "z+1"]), 14, "DegreeTooLow"),
        (run(&["rat", "analyze", "--map", "z^2/(z-z)"]), 15, "DivisionByZeroPolynomial"),
        (run(&["rat", "lyubich", "--map", "z^2", "--seed", "0", "--iters", "3"]), 16, "ExceptionalSeed"),
        (run(&["ifs", "kms", "--preset", "tent", "--beta", "0.5"]), 17, "OutOfRegime"),
        (run(&["rat", "kms", "--map", "z^2+1", "--beta", "1", "--point", "3"]), 18, "NotABranchPoint"),
        (
            run_env(&["ifs", "hutchinson", "--preset", "sierpinski", "--levels", "5"], &[("KMSDYN_ATOM_BUDGET", "10")]),
            19,
            "AtomBudgetExceeded",
        ),
        (run(&["ifs", "analyze", "--system", one_map.to_str().unwrap()]), 23, "InvalidSystem"),
        (run(&["ifs", "analyze", "--preset", "koch"]), 24, "InvalidInput"),
        (run(&["rat", "kms", "--map", "z^2", "--beta", "-1"]), 24, "InvalidInput"),
        (run(&["ifs", "analyze", "--system", "/nonexistent/system.json"]), 30, "IoError"),
    ];
    for (out, code, kind) in &cases {
        assert_eq!(error_of(out), (*code, kind.to_string()));
    }
    // argument errors come from the parser
    assert_eq!(run(&["rat", "kms", "--map", "z^2"]).status.code(), Some(2));
}
