mod common;

use common::at_velocity;
use gsf::corpus;
use gsf::model::sample_points;
use gsf::system::GaugeSystem;
use gsf::verify::{
    check_ids, fd_oracle, fd_oracle_corrupted, identity_residual, oracle_families, run_suite, vacuity_arity, Corruption, SuiteReport,
    FD_TOLERANCE,
};
use gsf::Error;
use serde_json::Value;

fn suite(name: &str) -> SuiteReport {
    run_suite(&corpus::load(name), 42, 100, 1e-8).unwrap()
}

#[test]
fn identity_residual_examples() {
    let free = corpus::load("free-sqrt");
    for p in sample_points(&free, 5, 3).unwrap() {
        assert!(identity_residual(&free, "1.25", &p).unwrap() <= 1e-12);
    }
    let rebased = corpus::load("double-root-rebased-p");
    assert!(identity_residual(&rebased, "1.23", &at_velocity(&[1.0, 1.0, 4.0, 1.0])).unwrap() <= 1e-9);
    assert!(identity_residual(&rebased, "1.24", &at_velocity(&[1.0, 1.0, 4.0, 1.0])).unwrap() <= 1e-9);

    let bad = corpus::load("free-sqrt-badG");
    for p in sample_points(&bad, 5, 3).unwrap() {
        assert!((identity_residual(&bad, "2.8", &p).unwrap() - 0.05).abs() <= 1e-15);
    }
    assert!(matches!(identity_residual(&free, "9.99", &at_velocity(&[1.0, 1.0])), Err(Error::UnknownCheck(_))));
}

#[test]
fn check_table_covers_the_identity_tower() {
    let ids: Vec<&str> = check_ids().collect();
    for id in [
        "1.23", "1.24", "1.25", "1.27", "1.30", "1.35", "1.37", "1.381", "1.382", "1.45", "2.8", "2.11", "2.15", "2.20", "2.21", "2.22",
        "2.23", "2.24", "2.26", "2.29", "2.30", "2.31", "2.44", "2.45", "2.47", "2.54=2.55",
    ] {
        assert!(ids.contains(&id), "{id}");
    }
    assert_eq!(vacuity_arity("1.381").unwrap(), 3);
    assert_eq!(vacuity_arity("1.23").unwrap(), 2);
    assert_eq!(vacuity_arity("2.8").unwrap(), 0);
}

#[test]
fn free_sqrt_suite_passes_with_zero_tensors() {
    let r = suite("free-sqrt");
    assert!(r.passed);
    let m = r.tensor_magnitudes;
    assert_eq!((m.t, m.e, m.d, m.m), (0.0, 0.0, 0.0, 0.0));
    for id in ["1.30", "1.37", "1.381", "1.382", "1.45", "2.29"] {
        assert!(r.check(id).unwrap().vacuous, "{id}");
    }
    assert!(!r.check("1.6").unwrap().vacuous);
}

#[test]
fn rebased_q_suite_reports_the_pulled_structure_function() {
    let spec = corpus::load("double-root-rebased-q");
    let r = run_suite(&spec, 42, 100, 1e-8).unwrap();
    assert!(r.passed);
    let want = sample_points(&spec, 100, 42).unwrap().iter().map(|p| 0.5 * (p.v[2] / p.v[3]).sqrt()).fold(0.0, f64::max);
    assert!((r.tensor_magnitudes.t - want).abs() <= 1e-13 * want, "{} vs {want}", r.tensor_magnitudes.t);
    assert_eq!((r.tensor_magnitudes.e, r.tensor_magnitudes.d, r.tensor_magnitudes.m), (0.0, 0.0, 0.0));
    assert!(!r.check("1.23").unwrap().vacuous);
}

#[test]
fn triple_root_rebased_passes_third_and_fourth_order() {
    let r = suite("triple-root-rebased");
    assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
    for id in ["1.37", "1.381", "1.382", "1.41", "2.29", "sym.D"] {
        let c = r.check(id).unwrap();
        assert!(c.passed && !c.vacuous, "{c:?}");
    }
    assert!(r.check("1.45").unwrap().passed);
    assert!(r.tensor_magnitudes.d > 1e-3);
}

#[test]
fn mutants_fail_named_checks() {
    let expect = [
        ("free-sqrt-badG", vec!["2.8"]),
        ("free-sqrt-symbreak", vec!["1.9", "1.10", "2.20", "2.23"]),
        ("double-root-rebased-q-badC", vec!["1.23", "2.24"]),
    ];
    for (name, ids) in expect {
        let r = suite(name);
        assert!(!r.passed, "{name}");
        let failed: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
        assert_eq!(failed, ids, "{name}");
        for c in r.failures() {
            assert!(c.max_residual > 1e-3, "{name} {}: {}", c.id, c.max_residual);
        }
    }
    let bad = suite("free-sqrt-badG");
    assert!((bad.check("2.8").unwrap().max_residual - 0.05).abs() <= 1e-15);
}

#[test]
fn report_json_schema() {
    let r = suite("double-root");
    let v: Value = serde_json::from_str(&r.to_json()).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["checks", "model", "passed", "points", "seed", "tensor_magnitudes", "tolerance"]);
    assert_eq!(obj["model"], "double-root");
    assert_eq!(obj["seed"], 42);
    assert_eq!(obj["points"], 100);
    assert_eq!(obj["tolerance"], 1e-8);
    for c in obj["checks"].as_array().unwrap() {
        let mut keys: Vec<&str> = c.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["id", "max_residual", "passed", "vacuous"]);
    }
    let mut mags: Vec<&str> = obj["tensor_magnitudes"].as_object().unwrap().keys().map(String::as_str).collect();
    mags.sort_unstable();
    assert_eq!(mags, ["D", "E", "M", "T"]);
}

#[test]
fn reports_are_deterministic() {
    for name in ["double-root-rebased-p", "triple-root-rebased"] {
        assert_eq!(suite(name).to_json(), suite(name).to_json());
    }
    assert_ne!(suite("free-sqrt").to_json(), run_suite(&corpus::load("free-sqrt"), 43, 100, 1e-8).unwrap().to_json());
}

#[test]
fn oracle_agrees_on_the_corpus() {
    for entry in corpus::models() {
        let spec = entry.spec().unwrap();
        for c in fd_oracle(&spec, 42, 100).unwrap() {
            assert!(c.passed, "{} {}: {}", entry.name, c.id, c.max_residual);
            assert!(c.max_residual <= FD_TOLERANCE);
        }
    }
}

#[test]
fn oracle_examples() {
    let free = fd_oracle(&corpus::load("free-sqrt"), 42, 100).unwrap();
    let w = free.iter().find(|c| c.id == "fd:W").unwrap();
    assert!(w.max_residual <= 1e-7 && !w.vacuous, "{w:?}");

    let triple = fd_oracle(&corpus::load("triple-root-rebased"), 42, 100).unwrap();
    let dc = triple.iter().find(|c| c.id == "fd:dC/dp").unwrap();
    assert!(dc.max_residual <= 1e-6 && !dc.vacuous, "{dc:?}");
}

#[test]
fn corrupting_one_entry_flags_exactly_its_family() {
    let spec = corpus::load("free-sqrt");
    let sys = GaugeSystem::new(&spec).unwrap();
    let w_len = oracle_families(&sys).unwrap().iter().find(|f| f.name == "W").unwrap().len();
    for seed in 0..4 {
        let cor = Corruption::seeded("W", w_len, 1e-3, seed);
        let failed: Vec<String> =
            fd_oracle_corrupted(&spec, 42, 20, Some(&cor)).unwrap().into_iter().filter(|c| !c.passed).map(|c| c.id).collect();
        assert_eq!(failed, ["fd:W"], "entry {}", cor.entry);
    }
}
