//! Whole-suite runs and the JSON report.

use rayon::prelude::*;
use serde::Serialize;

use super::identities::{lookup, CHECKS};
use super::residual::{Residual, Scale};
use super::{perturb, Verifier};
use crate::error::Result;
use crate::model::{sample_points, ModelSpec, SamplePoint};
use crate::structure::StructureTensors;
use crate::system::GaugeSystem;

/// Summands never exceeding this anywhere make a check vacuous.
pub const VACUITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub max_residual: f64,
    #[serde(skip)]
    pub scale: Scale,
    pub passed: bool,
    pub vacuous: bool,
}

/// Largest entry magnitude of each tensor over the points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Magnitudes {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub model: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
    pub tensor_magnitudes: Magnitudes,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct PointOutcome {
    residuals: Vec<Residual>,
    mags: [f64; 4],
}

fn evaluate_point(ver: &Verifier, p: &SamplePoint, seed: u64, k: usize) -> Result<PointOutcome> {
    let vals = ver.at(p)?;
    let off = ver.at_phase(&p.q, &perturb(&vals.momenta.data, seed, k))?;
    let mut residuals = Vec::with_capacity(CHECKS.len());
    for c in CHECKS {
        let r = vals.residual(c.id)?;
        residuals.push(match c.id {
            "2.24" => r.max(off.closure()),
            "2.26" => off.jacobi(),
            _ => r,
        });
    }
    let mags = [vals.t.max_abs(), vals.e.max_abs(), vals.d.max_abs(), vals.m.max_abs()];
    Ok(PointOutcome { residuals, mags })
}

/// Samples `count` points and runs every check at tolerance `tol`.
pub fn run_suite(spec: &ModelSpec, seed: u64, count: usize, tol: f64) -> Result<SuiteReport> {
    let points = sample_points(spec, count, seed)?;
    let sys = GaugeSystem::new(spec)?;
    let tensors = sys.structure_tensors()?;
    run_suite_with(&sys, &tensors, seed, &points, tol)
}

/// Runs every check for given structure tensors at given points.
pub fn run_suite_with(sys: &GaugeSystem, tensors: &StructureTensors, seed: u64, points: &[SamplePoint], tol: f64) -> Result<SuiteReport> {
    let ver = Verifier::new(sys, tensors)?;
    let outcomes: Vec<PointOutcome> =
        points.par_iter().enumerate().map(|(k, p)| evaluate_point(&ver, p, seed, k)).collect::<Result<_>>()?;
    let m = sys.m();
    let mut checks = Vec::with_capacity(CHECKS.len());
    for (j, c) in CHECKS.iter().enumerate() {
        let worst = outcomes.iter().fold(Residual::ZERO, |acc, o| acc.max(o.residuals[j]));
        let vacuous = m < c.arity || (worst.summands >= 2 && worst.magnitude <= VACUITY_FLOOR);
        checks.push(CheckResult { id: c.id.to_string(), max_residual: worst.value, scale: c.scale, passed: worst.value <= tol, vacuous });
    }
    let mut mags = Magnitudes::default();
    for o in &outcomes {
        mags.t = mags.t.max(o.mags[0]);
        mags.e = mags.e.max(o.mags[1]);
        mags.d = mags.d.max(o.mags[2]);
        mags.m = mags.m.max(o.mags[3]);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { model: sys.spec.name.clone(), seed, points: points.len(), tolerance: tol, checks, tensor_magnitudes: mags, passed })
}

/// Residual of one identity at one point. Off-surface parts use the
/// point's own momenta shifted with seed 0.
pub fn identity_residual(spec: &ModelSpec, id: &str, point: &SamplePoint) -> Result<f64> {
    let wanted = lookup(id)?.id;
    let j = CHECKS.iter().position(|c| c.id == wanted).expect("looked-up id is in the table");
    let sys = GaugeSystem::new(spec)?;
    let ver = sys.verifier()?;
    Ok(evaluate_point(&ver, point, 0, 0)?.residuals[j].value)
}
