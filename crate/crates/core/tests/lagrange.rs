mod common;

use common::{assert_close, at_velocity, eval, model, point};
use gsf::corpus;
use gsf::lagrange::{alpha, b_field, el_residual, hessian, noether_check};
use gsf::legendre::{gauge_generators, PullbackMap};
use gsf::linalg::rank;
use gsf::model::sample_points;
use gsf::system::GaugeSystem;
use proptest::prelude::*;

const QUADRATIC: &str = "model quadratic
dim 2
gauge 1
coords q1 q2
lagrangian 1/2*v1^2 - q1
constraint G1 p2
hamiltonian 1/2*p1^2 + q1
";

const MAGNETIC: &str = "model magnetic
dim 3
gauge 2
coords q1 q2 q3
lagrangian q2*v1 + 1/2*v3^2
constraint G1 p1 - q2
constraint G2 p2
hamiltonian 1/2*p3^2
";

#[test]
fn hessian_examples() {
    let spec = corpus::load("free-sqrt");
    assert_close(&eval(&spec, &hessian(&spec), &at_velocity(&[1.0, 1.0])), &[-0.25, 0.25, 0.25, -0.25], 1e-15);

    let spec = model(&QUADRATIC.replace("1/2*v1^2 - q1", "1/2*(v1^2 + v2^2)"));
    assert_close(&eval(&spec, &hessian(&spec), &at_velocity(&[0.3, -0.7])), &[1.0, 0.0, 0.0, 1.0], 0.0);

    let spec = corpus::load("relativistic-particle");
    assert_close(&eval(&spec, &hessian(&spec), &at_velocity(&[1.0, 0.0])), &[0.0, 0.0, 0.0, 1.0], 1e-15);
}

#[test]
fn alpha_examples() {
    assert!(alpha(&corpus::load("free-sqrt")).is_zero());
    assert!(alpha(&corpus::load("double-root")).is_zero());
    let spec = model(QUADRATIC);
    let a = alpha(&spec);
    assert_close(&eval(&spec, &a, &point(&[0.4, 1.1], &[0.2, -0.3], &[0.0, 0.0])), &[-1.0, 0.0], 0.0);
}

#[test]
fn euler_lagrange_examples() {
    let spec = model(&QUADRATIC.replace(" - q1", ""));
    assert_eq!(el_residual(&spec).get(&[0]).to_string(), "a1");

    let spec = corpus::load("free-sqrt");
    let l = el_residual(&spec);
    assert_close(&eval(&spec, &l, &point(&[0.3, -1.2], &[1.0, 1.0], &[1.0, 1.0])), &[0.0, 0.0], 1e-15);
    assert_close(&eval(&spec, &l, &point(&[0.0, 0.0], &[1.0, 1.0], &[1.0, -1.0])), &[-0.5, 0.5], 1e-15);
}

#[test]
fn b_field_examples() {
    assert!(b_field(&corpus::load("free-sqrt")).is_zero());
    let spec = model(MAGNETIC);
    let b = b_field(&spec);
    assert_eq!(b.get(&[0, 1]).to_string(), "1");
    assert_eq!(b.get(&[1, 0]).to_string(), "-1");
    for entry in corpus::models() {
        let spec = entry.spec().unwrap();
        let b = b_field(&spec);
        for i in 0..spec.n() {
            assert!(b.get(&[i, i]).is_zero());
        }
    }
}

#[test]
fn hessian_and_b_field_symmetries_are_structural() {
    for entry in corpus::CORPUS {
        let spec = entry.spec().unwrap();
        let (w, b) = (hessian(&spec), b_field(&spec));
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                assert_eq!(w.get(&[i, j]), w.get(&[j, i]), "{}", entry.name);
                assert_eq!(*b.get(&[i, j]), -b.get(&[j, i]).clone(), "{}", entry.name);
            }
        }
    }
}

#[test]
fn noether_identities() {
    let residuals = |name: &str| {
        let spec = corpus::load(name);
        let r = gauge_generators(&spec, &PullbackMap::from_spec(&spec));
        noether_check(&spec, &r, &sample_points(&spec, 100, 42).unwrap()).unwrap()
    };
    let free = residuals("free-sqrt");
    assert!(free.alpha <= 1e-15 && free.el <= 1e-15, "{free:?}");
    let rel = residuals("relativistic-particle");
    assert!(rel.alpha <= 1e-12 && rel.el <= 1e-12, "{rel:?}");
    let broken = residuals("free-sqrt-symbreak");
    assert!(broken.alpha > 1e-3, "{broken:?}");
    assert!(broken.el > 1e-3, "{broken:?}");
}

#[test]
fn hessian_rank_and_kernel_identities_hold_on_the_corpus() {
    for entry in corpus::models() {
        let spec = entry.spec().unwrap();
        let w = hessian(&spec);
        let n = spec.n();
        let ver = GaugeSystem::new(&spec).unwrap().verifier().unwrap();
        for p in sample_points(&spec, 100, 42).unwrap() {
            let vals = ver.at(&p).unwrap();
            let num = eval(&spec, &w, &p);
            let rows: Vec<Vec<f64>> = num.data.chunks(n).map(<[f64]>::to_vec).collect();
            assert_eq!(rank(&rows), n - spec.m(), "{}", entry.name);
            assert!(vals.residual("1.6").unwrap().value <= 1e-10, "{}", entry.name);
            assert!(vals.residual("2.20").unwrap().value <= 1e-9, "{}", entry.name);
            assert!(vals.residual("2.21").unwrap().value <= 1e-10, "{}", entry.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_directions_solve_the_euler_lagrange_operator(seed in any::<u64>(), c in -2.0f64..2.0) {
        let spec = corpus::load("free-sqrt");
        let p = sample_points(&spec, 1, seed).unwrap().remove(0);
        // W q̈ vanishes along q̈ ∝ q̇, the gauge direction.
        let along = point(&p.q, &p.v, &[c * p.v[0], c * p.v[1]]);
        let l = eval(&spec, &el_residual(&spec), &along);
        prop_assert!(l.max_abs() <= 1e-12 * (1.0 + c.abs()) * 16.0);
    }
}
