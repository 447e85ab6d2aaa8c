mod common;

use gsf::corpus;
use gsf::linalg::rank;
use gsf::model::{parse_model, sample_points, validate_model, ModelError};
use proptest::prelude::*;

const FREE_SQRT: &str = include_str!("../corpus/free-sqrt.gsf");

#[test]
fn parses_free_sqrt() {
    let spec = parse_model(FREE_SQRT).unwrap();
    assert_eq!(spec.name, "free-sqrt");
    assert_eq!((spec.n(), spec.m()), (2, 1));
    assert!(spec.structure.is_zero());
    assert!(spec.hamiltonian.is_zero());
    assert_eq!(spec.domain.len(), 2);
}

#[test]
fn missing_hamiltonian_is_reported() {
    let text = FREE_SQRT.replace("hamiltonian 0", "");
    let err = parse_model(&text).unwrap_err();
    assert_eq!(err, ModelError::MissingSection("hamiltonian"));
    assert_eq!(err.to_string(), "missing section: hamiltonian");
}

#[test]
fn diagonal_structure_function_is_rejected() {
    let text = format!("{FREE_SQRT}structure 1 1 1 p1\n");
    let err = parse_model(&text).unwrap_err();
    assert!(matches!(err, ModelError::Antisymmetry { .. }));
    assert!(err.to_string().contains("structure functions antisymmetric: diagonal must vanish"), "{err}");
}

#[test]
fn syntax_errors_carry_positions() {
    let text = FREE_SQRT.replace("sqrt(v1*v2)", "sqrt(v1*)");
    match parse_model(&text).unwrap_err() {
        ModelError::Syntax { line, .. } => assert_eq!(line, 8),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_symbols_are_rejected() {
    assert!(parse_model(&FREE_SQRT.replace("p1*p2", "p1*r2")).is_err());
}

#[test]
fn wrong_constraint_count_is_rejected() {
    let text = FREE_SQRT.replace("constraint G1 p1*p2 - 1/4", "constraint G1 p1*p2 - 1/4\nconstraint G2 p1");
    assert!(matches!(parse_model(&text), Err(ModelError::Arity { .. })));
}

#[test]
fn constraints_must_not_mention_velocities() {
    let text = FREE_SQRT.replace("p1*p2 - 1/4", "p1*v2 - 1/4");
    assert!(matches!(parse_model(&text), Err(ModelError::WrongSpace { .. })));
}

#[test]
fn samples_respect_the_domain() {
    let spec = corpus::load("free-sqrt");
    let pts = sample_points(&spec, 3, 7).unwrap();
    assert_eq!(pts.len(), 3);
    for p in &pts {
        assert!(p.v[0] > 0.0 && p.v[1] > 0.0);
        assert!(p.q.iter().chain(&p.v).chain(&p.a).all(|x| x.abs() <= 2.0));
        assert!(spec.contains(&p.q, &p.v));
    }
}

#[test]
fn contradictory_domain_exhausts_the_budget() {
    let text = FREE_SQRT.replace("domain v2 > 0", "domain -v1 - 1 > 0");
    let spec = parse_model(&text).unwrap();
    assert_eq!(sample_points(&spec, 1, 0).unwrap_err(), ModelError::DomainTooSmall(10_000));
}

#[test]
fn sampling_is_deterministic() {
    for entry in corpus::models() {
        let spec = entry.spec().unwrap();
        let a = sample_points(&spec, 20, 99).unwrap();
        let b = sample_points(&spec, 20, 99).unwrap();
        let bits = |v: &[gsf::model::SamplePoint]| -> Vec<u64> { v.iter().flat_map(|p| p.q.iter().chain(&p.v).chain(&p.a).map(|x| x.to_bits()).collect::<Vec<_>>()).collect() };
        assert_eq!(bits(&a), bits(&b), "{}", entry.name);
        assert_ne!(a, sample_points(&spec, 20, 100).unwrap());
    }
}

#[test]
fn render_round_trips() {
    for entry in corpus::CORPUS {
        let spec = entry.spec().unwrap();
        let text = spec.render();
        let again = parse_model(&text).unwrap();
        assert_eq!(again, spec, "{}", entry.name);
        assert_eq!(again.render(), text);
    }
}

#[test]
fn corpus_models_validate() {
    for entry in corpus::models() {
        let spec = entry.spec().unwrap();
        let pts = sample_points(&spec, 100, 42).unwrap();
        let report = validate_model(&spec, &pts).unwrap();
        assert!(report.passed, "{}: {:?}", entry.name, report);
        for c in report.checks.iter().filter(|c| c.name != "rebase-det") {
            assert!(c.worst <= 1e-10, "{} {}: {}", entry.name, c.name, c.worst);
        }
        match report.check("rebase-det") {
            Some(det) => assert!(spec.rebase.is_some() && det.worst > 0.5, "{}: {}", entry.name, det.worst),
            None => assert!(spec.rebase.is_none()),
        }
    }
}

#[test]
fn bad_constraint_constant_fails_validation_by_a_twentieth() {
    let spec = corpus::load("free-sqrt-badG");
    let pts = sample_points(&spec, 100, 42).unwrap();
    let report = validate_model(&spec, &pts).unwrap();
    let c = report.check("constraints").unwrap();
    assert!(!c.passed);
    assert!((c.worst - 0.05).abs() < 1e-12, "{}", c.worst);
    assert!(report.structurally_sound());
}

#[test]
fn free_sqrt_hessian_has_rank_one() {
    let spec = corpus::load("free-sqrt");
    let w = common::eval(&spec, &gsf::lagrange::hessian(&spec), &common::at_velocity(&[1.0, 1.0]));
    common::assert_close(&w, &[-0.25, 0.25, 0.25, -0.25], 1e-15);
    assert_eq!(rank(&[w.data[..2].to_vec(), w.data[2..].to_vec()]), 1);
}

proptest! {
    #[test]
    fn rank_is_stable_under_row_scaling(s in proptest::collection::vec(0.5f64..2.0, 4), seed in 0u64..50) {
        for name in ["double-root", "double-root-rebased-p"] {
            let spec = corpus::load(name);
            let p = &sample_points(&spec, 1, seed).unwrap()[0];
            let w = common::eval(&spec, &gsf::lagrange::hessian(&spec), p);
            let rows: Vec<Vec<f64>> = (0..4).map(|i| w.data[4 * i..4 * i + 4].iter().map(|x| x * s[i]).collect()).collect();
            prop_assert_eq!(rank(&rows), spec.n() - spec.m());
        }
    }
}
