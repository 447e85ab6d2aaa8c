use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelSpec};
use crate::expr::{Symbol, Tape};

/// Half-width of the sampling box for q, q̇ and q̈.
pub const SAMPLE_BOX: f64 = 2.0;
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

/// A point of the second-order jet space: coordinates, velocities and
/// accelerations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

impl SamplePoint {
    /// `(q, q̇)` concatenated.
    pub fn qv(&self) -> Vec<f64> {
        self.q.iter().chain(&self.v).copied().collect()
    }
}

pub(crate) fn domain_tape(spec: &ModelSpec) -> Tape {
    let inputs: Vec<Symbol> = spec.coords.family(crate::expr::SymbolKind::Coordinate)
        .into_iter()
        .chain(spec.coords.family(crate::expr::SymbolKind::Velocity))
        .collect();
    Tape::compile(&spec.domain, &inputs).expect("domain predicates are checked to live on (q, q̇) at parse time")
}

pub(crate) fn in_domain(tape: &Tape, qv: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> bool {
    tape.eval_into(qv, scratch, out).is_ok() && out.iter().all(|&d| d > 0.0)
}

impl ModelSpec {
    /// Whether `(q, q̇)` satisfies every domain predicate.
    pub fn contains(&self, q: &[f64], v: &[f64]) -> bool {
        if q.len() != self.n() || v.len() != self.n() {
            return false;
        }
        let qv: Vec<f64> = q.iter().chain(v).copied().collect();
        let mut preds = vec![0.0; self.domain.len()];
        in_domain(&domain_tape(self), &qv, &mut Vec::new(), &mut preds)
    }
}

/// Draws `count` points uniformly from the box, rejecting those outside the
/// model's domain. Deterministic in `seed`.
pub fn sample_points(spec: &ModelSpec, count: usize, seed: u64) -> Result<Vec<SamplePoint>, ModelError> {
    let n = spec.n();
    let tape = domain_tape(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-SAMPLE_BOX, SAMPLE_BOX);
    let mut scratch = Vec::new();
    let mut preds = vec![0.0; spec.domain.len()];
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let q: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let v: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let a: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let qv: Vec<f64> = q.iter().chain(&v).copied().collect();
        if in_domain(&tape, &qv, &mut scratch, &mut preds) {
            out.push(SamplePoint { q, v, a });
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(ModelError::DomainTooSmall(rejected));
            }
        }
    }
    Ok(out)
}
