use gsf::cli::{run, Output, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn gsf(args: &[&str]) -> Output {
    run(std::iter::once("gsf").chain(args.iter().copied()))
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn check_exit_codes() {
    let out = gsf(&["check", "corpus/free-sqrt.gsf"]);
    assert_eq!(out.code, EXIT_PASS, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("PASS"));

    let out = gsf(&["check", "corpus/mutants/free-sqrt-badG.gsf", "--format", "json"]);
    assert_eq!(out.code, EXIT_FAIL);
    let v = json(&out);
    assert_eq!(v["passed"], false);
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["id"], "2.8");
    assert!((failed[0]["max_residual"].as_f64().unwrap() - 0.05).abs() <= 1e-15);

    assert_eq!(gsf(&["check", "nonexistent.gsf"]).code, EXIT_USAGE);
}

#[test]
fn text_report_names_the_failing_check() {
    let out = gsf(&["check", "corpus/mutants/free-sqrt-badG.gsf"]);
    assert_eq!(out.code, EXIT_FAIL);
    let line = out.stdout.lines().find(|l| l.contains("2.8") && l.contains("FAIL")).expect(&out.stdout);
    assert!(line.contains("5.000e-2") || line.contains("0.05"), "{line}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "corpus/free-sqrt.gsf", "--bogus"][..],
        &["check"],
        &["frobnicate"],
        &["check", "corpus/free-sqrt.gsf", "--samples", "0"],
        &["check", "corpus/free-sqrt.gsf", "--tol", "-1"],
        &["check", "corpus/free-sqrt.gsf", "--format", "yaml"],
        &["compute", "corpus/free-sqrt.gsf", "--tensor", "Z"],
        &["compute", "corpus/free-sqrt.gsf"],
    ] {
        let out = gsf(args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(gsf(&["--help"]).code, EXIT_PASS);
}

#[test]
fn bundled_models_load_by_name() {
    assert_eq!(gsf(&["check", "relativistic-particle"]).code, EXIT_PASS);
}

#[test]
fn compute_t_on_rebased_q() {
    let out = gsf(&["compute", "corpus/double-root-rebased-q.gsf", "--tensor", "T", "--point", "0,0,0,0,1,1,1,1"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().filter(|l| l.starts_with("T[")).collect();
    assert_eq!(lines.len(), 8);
    for l in lines {
        let (ix, val) = l.split_once(" = ").unwrap();
        let val: f64 = val.parse().unwrap();
        match ix {
            "T[1][2][2]" => assert_eq!(val, 0.5),
            "T[2][1][2]" => assert_eq!(val, -0.5),
            _ => assert_eq!(val, 0.0, "{ix}"),
        }
    }
}

#[test]
fn compute_r_on_free_sqrt() {
    let out = gsf(&["compute", "corpus/free-sqrt.gsf", "--tensor", "R", "--point", "0,0,1,1", "--format", "json"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["values"], serde_json::json!([[0.5, 0.5]]));
    assert_eq!(v["shape"], serde_json::json!([1, 2]));
}

#[test]
fn compute_d_vanishes_for_two_generators() {
    let out = gsf(&["compute", "double-root", "--tensor", "D", "--point", "0.1,0.2,0.3,0.4,1,2,3,4", "--format", "json"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let v = json(&out);
    fn all_zero(v: &Value) -> bool {
        match v {
            Value::Array(a) => a.iter().all(all_zero),
            x => x.as_f64() == Some(0.0),
        }
    }
    assert!(all_zero(&v["values"]));
}

#[test]
fn compute_symbolic_entries() {
    let out = gsf(&["compute", "double-root-rebased-q", "--tensor", "T", "--format", "json"]);
    assert_eq!(out.code, EXIT_PASS);
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["index"], serde_json::json!([1, 2, 2]));
}

#[test]
fn compute_point_errors() {
    let dim = gsf(&["compute", "corpus/free-sqrt.gsf", "--tensor", "R", "--point", "0,0,1"]);
    assert_eq!(dim.code, EXIT_USAGE);
    let outside = gsf(&["compute", "corpus/free-sqrt.gsf", "--tensor", "R", "--point", "0,0,-1,1"]);
    assert_eq!(outside.code, EXIT_USAGE, "{}", outside.stdout);
    assert!(outside.stderr.contains("domain"));
}

#[test]
fn missing_acceleration_block_warns_only_when_needed() {
    let t = gsf(&["compute", "free-sqrt", "--tensor", "W", "--point", "0,0,1,1"]);
    assert_eq!(t.code, EXIT_PASS);
    assert!(t.stderr.is_empty(), "{}", t.stderr);
    let full = gsf(&["compute", "free-sqrt", "--tensor", "W", "--point", "0,0,1,1,0,0"]);
    assert_eq!(full.stdout, t.stdout);
}

#[test]
fn corpus_table_lists_models_and_mutants() {
    let out = gsf(&["corpus"]);
    assert_eq!(out.code, EXIT_PASS);
    for name in [
        "free-sqrt",
        "relativistic-particle",
        "double-root",
        "double-root-rebased-q",
        "double-root-rebased-p",
        "triple-root-rebased",
    ] {
        assert!(out.stdout.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name}");
    }
    assert!(out.stdout.lines().filter(|l| l.contains("mutant")).count() >= 3);
}

#[test]
fn verify_all_passes_for_any_seed() {
    for seed in ["42", "7"] {
        let out = gsf(&["corpus", "--verify-all", "--seed", seed]);
        assert_eq!(out.code, EXIT_PASS, "seed {seed}: {}", out.stdout);
        assert!(out.stdout.contains("ALL OK"));
    }
}

#[test]
fn oracle_reports_fd_checks() {
    let out = gsf(&["oracle", "triple-root-rebased", "--samples", "20", "--format", "json"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stdout);
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["id"].as_str().unwrap().starts_with("fd:")));
}

#[test]
fn report_file_matches_the_suite_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = gsf(&["check", "double-root-rebased-p", "--report", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_PASS);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["checks", "model", "passed", "points", "seed", "tensor_magnitudes", "tolerance"]);
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["id"] == "fd:W"));

    let json_out = gsf(&["check", "double-root-rebased-p", "--format", "json"]);
    assert_eq!(json(&json_out), v);
}

#[test]
fn binary_exit_codes() {
    let code = |args: &[&str]| std::process::Command::new(env!("CARGO_BIN_EXE_gsf")).args(args).output().unwrap().status.code();
    assert_eq!(code(&["check", "corpus/free-sqrt.gsf"]), Some(0));
    assert_eq!(code(&["check", "corpus/mutants/free-sqrt-badG.gsf"]), Some(1));
    assert_eq!(code(&["check", "nonexistent.gsf"]), Some(2));
    assert_eq!(code(&["check", "corpus/free-sqrt.gsf", "--bogus"]), Some(2));
}
