#![allow(dead_code)]

use gsf::model::{parse_model, ModelSpec, SamplePoint};
use gsf::tensor::{IndexedExpr, NumTensor, TensorBundle};
use gsf::verify::{jet_input, jet_symbols};

pub fn point(q: &[f64], v: &[f64], a: &[f64]) -> SamplePoint {
    SamplePoint { q: q.to_vec(), v: v.to_vec(), a: a.to_vec() }
}

/// Point with `q = 0` and `q̈ = 0`.
pub fn at_velocity(v: &[f64]) -> SamplePoint {
    point(&vec![0.0; v.len()], v, &vec![0.0; v.len()])
}

pub fn eval(spec: &ModelSpec, t: &IndexedExpr, p: &SamplePoint) -> NumTensor {
    let bundle = TensorBundle::compile(&[t], &jet_symbols(&spec.coords)).unwrap();
    bundle.eval(&jet_input(p), &mut Vec::new()).unwrap().remove(0)
}

pub fn assert_close(got: &NumTensor, want: &[f64], tol: f64) {
    assert_eq!(got.data.len(), want.len(), "shape {:?}", got.shape);
    for (k, (g, w)) in got.data.iter().zip(want).enumerate() {
        assert!((g - w).abs() <= tol, "entry {k}: got {g}, want {w}");
    }
}

pub fn model(text: &str) -> ModelSpec {
    parse_model(text).unwrap()
}
