//! Numeric sanity checks that a model is a consistent gauge system.

use serde::Serialize;

use super::{ModelSpec, SamplePoint};
use crate::error::Result;
use crate::hamilton::{determinant, REBASE_DET_TOL};
use crate::linalg;
use crate::system::GaugeSystem;
use crate::tensor::{IndexedExpr, TensorBundle};
use crate::verify::{jet_input, jet_symbols, residual::normalized};

/// Tolerance on `FL*G` and on `FL*H_c − E`.
pub const VALIDATION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    /// Worst rank deficit, residual, or (for the rebase) smallest `|det|`.
    pub worst: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether the rank conditions hold; residual failures are left to the
    /// identity suite.
    pub fn structurally_sound(&self) -> bool {
        self.checks.iter().filter(|c| c.name.starts_with("rank") || c.name == "rebase-det").all(|c| c.passed)
    }
}

pub fn validate_model(spec: &ModelSpec, points: &[SamplePoint]) -> Result<ValidationReport> {
    let sys = GaugeSystem::new(spec)?;
    let (n, m) = (spec.n(), spec.m());
    let energy = IndexedExpr::from_fn(&[], n, m, |_| sys.lag.energy.clone());
    let det = spec.rebase.as_ref().map(|lam| {
        let d = sys.pm.apply(&determinant(lam));
        IndexedExpr::from_fn(&[], n, m, |_| d.clone())
    });
    let mut parts = vec![&sys.lag.hessian, &sys.pulled.r, &sys.pulled.g, &sys.pulled.hc, &energy];
    parts.extend(det.as_ref());
    let bundle = TensorBundle::compile(&parts, &jet_symbols(&spec.coords))?;
    let mut rank_w: f64 = 0.0;
    let mut rank_r: f64 = 0.0;
    let mut flg: f64 = 0.0;
    let mut hc: f64 = 0.0;
    let mut det_min = f64::INFINITY;
    let mut scratch = Vec::new();
    for p in points {
        let t = bundle.eval(&jet_input(p), &mut scratch)?;
        let rows = |x: &crate::tensor::NumTensor| x.data.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>();
        rank_w = rank_w.max((linalg::rank(&rows(&t[0])) as f64 - (n - m) as f64).abs());
        rank_r = rank_r.max((linalg::rank(&rows(&t[1])) as f64 - m as f64).abs());
        flg = flg.max(t[2].max_abs());
        hc = hc.max(normalized(&[t[3].data[0], -t[4].data[0]]));
        if let Some(d) = t.get(5) {
            det_min = det_min.min(d.data[0].abs());
        }
    }
    let mut checks = vec![
        ValidationCheck { name: "rank-W", worst: rank_w, passed: rank_w == 0.0 },
        ValidationCheck { name: "rank-R", worst: rank_r, passed: rank_r == 0.0 },
        ValidationCheck { name: "constraints", worst: flg, passed: flg <= VALIDATION_TOL },
        ValidationCheck { name: "hamiltonian", worst: hc, passed: hc <= VALIDATION_TOL },
    ];
    if det.is_some() {
        checks.push(ValidationCheck { name: "rebase-det", worst: det_min, passed: det_min > REBASE_DET_TOL });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { checks, passed })
}
