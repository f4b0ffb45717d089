use std::fs;
use std::process::{Command, Output};

fn matchbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchbox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = matchbox(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn residue_table() {
    assert_eq!(stdout(&["residue", "--k", "3", "--n", "2", "--p", "1/2", "--mode", "exact"]), "n,M_n\n1,2\n2,13/4\n");
    assert_eq!(stdout(&["residue", "--k", "3", "--n-max", "3", "--p", "0.5", "--method", "oracle"]).lines().last(), Some("3,35/8"));
    assert_eq!(stdout(&["residue", "--k", "2", "--n", "1", "--p", "0.3"]), "n,M_n\n1,1\n");
    let float = stdout(&["residue", "--k", "3", "--n", "2", "--p", "0.5", "--mode", "float"]);
    assert_eq!(float, "n,M_n\n1,2\n2,3.25\n");
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = matchbox(&["residue", "--k", "3", "--n", "0", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    assert_eq!(matchbox(&["residue", "--k", "3", "--n", "2", "--p", "3/2"]).status.code(), Some(1));
    assert_eq!(matchbox(&["simulate", "--n", "3", "--p", "0.5", "--trials", "0"]).status.code(), Some(2));
    assert!(!matchbox(&["residue", "--n", "2", "--p", "x"]).status.success());
}

#[test]
fn json_output() {
    let text = stdout(&["first-return", "--k", "3", "--n", "2", "--p", "1/2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rows"][1]["R_n"], "7/4");
}

#[test]
fn diagonal_and_series() {
    let d = stdout(&["diagonal", "--k", "3", "--n", "2", "--p", "1/2"]);
    assert!(d.starts_with("n,f_n\n0,1\n1,1/4\n"));
    let s = stdout(&["series", "--k", "4", "--N", "3"]);
    assert_eq!(s, "n,coefficient\n0,0\n1,1\n2,3\n3,15\n");
}

#[test]
fn verify_suites() {
    let out = stdout(&["verify", "--suite", "bijection", "--k", "3", "--max-n", "4"]);
    assert_eq!(out.lines().count(), 5);
    assert!(out.lines().skip(1).all(|l| l.contains(",pass,")));
    let out = stdout(&["verify", "--suite", "gf", "--k", "4", "--N", "20"]);
    assert!(out.contains("k=4 N=20,pass"));
    assert_eq!(matchbox(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn default_verify_passes() {
    let out = stdout(&["verify"]);
    assert!(out.lines().count() > 40);
    assert!(!out.contains(",fail,"));
}

#[test]
fn simulate_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        stdout(&[
            "simulate", "--k", "3", "--n", "20", "--p-grid", "0:1:4", "--trials", "2000", "--seed", "7",
            "--format", "json", "--out", path.to_str().unwrap(),
        ]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("\"rng\": \"chacha8\""));
}

#[test]
fn figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = matchbox(&["figure", "--steps", "4", "--trials", "2000", "--seed", "3", "--out", out]);
    assert!(status.status.success());

    let residue = fs::read_to_string(dir.path().join("residue_k3_n100.csv")).unwrap();
    assert!(residue.starts_with("p,exact,mc_mean,mc_stderr\n"));
    let half = residue.lines().find(|l| l.starts_with("0.5,")).unwrap();
    let exact = stdout(&["residue", "--k", "3", "--n", "100", "--p", "0.5", "--mode", "float"]);
    let want = exact.lines().last().unwrap().split(',').nth(1).unwrap();
    let got: f64 = half.split(',').nth(1).unwrap().parse().unwrap();
    assert!((got - want.parse::<f64>().unwrap()).abs() < 1e-9);

    let lambda = fs::read_to_string(dir.path().join("lambda.csv")).unwrap();
    let row = lambda.lines().find(|l| l.starts_with("2,0.25,")).unwrap();
    let l: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((l - 1.0 / 3.0).abs() < 1e-14);
    assert!(lambda.lines().any(|l| l == "3,0.75,0.25,1"));

    assert!(dir.path().join("first_return_k3_n100.csv").exists());
}
