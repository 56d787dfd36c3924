use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn binsis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binsis")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn log10(v: &Value) -> f64 {
    v["log10"].as_f64().unwrap()
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.txt", "r: 2 1 1\nc: 1 2 1\n");
    let infeasible = write(&dir, "bad.txt", "r: 2 0\nc: 2 0\n");
    let garbled = write(&dir, "garbled.txt", "r: 1 x\nc: 1 1\n");
    assert_eq!(binsis(&["estimate", &ok, "-T", "10"]).status.code(), Some(0));
    assert_eq!(binsis(&["estimate", &infeasible, "-T", "10"]).status.code(), Some(2));
    assert_eq!(binsis(&["estimate", &garbled, "-T", "10"]).status.code(), Some(3));
    let missing = dir.path().join("missing.txt");
    assert_eq!(binsis(&["estimate", missing.to_str().unwrap(), "-T", "10"]).status.code(), Some(3));
    assert_eq!(binsis(&["estimate", &ok, "-T", "0"]).status.code(), Some(1));
    assert_eq!(binsis(&["--help"]).status.code(), Some(0));
}

#[test]
fn sample_output_is_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "r: 3 2 2 1 1\nc: 2 2 2 2 1\n");
    let w = write(&dir, "w.csv", "1,2,3,4,5\n0.5,1,1,2,1\n2,2,0,1,1\n1,1,1,1,1\n3,1,1,0.2,1\n");
    let run = |threads: &str, out: &Path| {
        let o = binsis(&["--threads", threads, "sample", &m, "-w", &w, "-T", "300", "--seed", "9", "-o", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("1", &dir.path().join("a.jsonl"));
    let b = run("4", &dir.path().join("b.jsonl"));
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 300);
}

#[test]
fn estimate_without_runtime_is_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "r: 3 2 2 1 1\nc: 2 2 2 2 1\n");
    let a = binsis(&["--threads", "1", "estimate", &m, "-T", "500", "--no-runtime"]);
    let b = binsis(&["--threads", "3", "estimate", &m, "-T", "500", "--no-runtime"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timing").is_none());
    assert!(json(&binsis(&["estimate", &m, "-T", "5"]))["timing"]["seconds"].is_number());
}

#[test]
fn samples_respect_margins_with_and_without_transpose() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "r: 2 1 1\nc: 1 2 1\n");
    for extra in [None, Some("--transpose")] {
        let mut args = vec!["sample", m.as_str(), "-T", "50"];
        args.extend(extra);
        let out = binsis(&args);
        assert!(out.status.success());
        for line in String::from_utf8(out.stdout).unwrap().lines() {
            let rec: Value = serde_json::from_str(line).unwrap();
            let (mut r, mut c) = (vec![0; 3], vec![0; 3]);
            for p in rec["ones"].as_array().unwrap() {
                r[p[0].as_u64().unwrap() as usize] += 1;
                c[p[1].as_u64().unwrap() as usize] += 1;
            }
            assert_eq!((r, c), (vec![2, 1, 1], vec![1, 2, 1]), "{extra:?}");
        }
    }
}

#[test]
fn transposed_estimate_targets_the_same_constant() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "r: 1 1 1 1\nc: 1 1 1 1\n");
    for extra in [None, Some("--transpose")] {
        let mut args = vec!["estimate", m.as_str(), "-T", "20"];
        args.extend(extra);
        assert!((log10(&json(&binsis(&args))["kappa_hat"]) - 24f64.log10()).abs() < 1e-12);
    }
}

#[test]
fn alpha_permanent_of_constant_matrix_reports_exact_value() {
    let v = json(&binsis(&["alpha-permanent", "--constant", "6", "--alpha", "1", "-T", "20"]));
    assert!((log10(&v["per_hat"]) - 720f64.log10()).abs() < 1e-12);
    assert!((log10(&v["exact"]) - 720f64.log10()).abs() < 1e-12);
}

#[test]
fn oracle_commands_print_reference_values() {
    let text = |args: &[&str]| String::from_utf8(binsis(args).stdout).unwrap().trim().to_string();
    assert_eq!(text(&["oracle", "two-regular", "4"]), "90");
    assert_eq!(text(&["oracle", "finch"]), "67149106137567626");
    let v = json(&binsis(&["oracle", "fixtures", "--max-two-regular", "6"]));
    assert_eq!(v["two_regular"][3]["count"], "90");
    assert_eq!(v["minstd"]["R"][0], 16807);
    assert_eq!(v["pathological"]["count"].as_str().unwrap(), text(&["oracle", "pathological", "24", "31", "24", "17"]));
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "r: 2 1 1\nc: 1 2 1\n");
    assert_eq!(text(&["oracle", "count", &m]), "5");
}
