//! Residual normalizations.

use serde::Serialize;

use crate::tensor::NumTensor;

/// `|Σ t| / (1 + Σ|t|)`
pub fn normalized(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    sum.abs() / (1.0 + scale)
}

/// How a check turns its summands into one number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Componentwise `|Σ t| / (1 + Σ|t|)`.
    Normalized,
    /// Componentwise `|Σ t|`.
    Absolute,
}

/// Residual of one identity at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Largest summand component seen.
    pub magnitude: f64,
    pub summands: usize,
}

impl Residual {
    pub const ZERO: Residual = Residual { value: 0.0, magnitude: 0.0, summands: 0 };

    pub fn max(self, other: Residual) -> Residual {
        Residual {
            value: self.value.max(other.value),
            magnitude: self.magnitude.max(other.magnitude),
            summands: self.summands.max(other.summands),
        }
    }
}

/// Componentwise residual of a sum of same-shape tensors.
pub fn tensor_residual(terms: &[NumTensor], scale: Scale) -> Residual {
    let len = terms.first().map_or(0, |t| t.data.len());
    let mut value: f64 = 0.0;
    let mut magnitude: f64 = 0.0;
    for k in 0..len {
        let mut sum = 0.0;
        let mut abs = 0.0;
        for t in terms {
            debug_assert_eq!(t.shape, terms[0].shape);
            let x = t.data[k];
            sum += x;
            abs += x.abs();
            magnitude = magnitude.max(x.abs());
        }
        value = value.max(match scale {
            Scale::Normalized => sum.abs() / (1.0 + abs),
            Scale::Absolute => sum.abs(),
        });
    }
    Residual { value, magnitude, summands: terms.len() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_is_bounded_by_one() {
        assert_eq!(normalized(&[]), 0.0);
        assert_eq!(normalized(&[1.0, -1.0]), 0.0);
        assert!((normalized(&[3.0]) - 0.75).abs() < 1e-15);
        assert!(normalized(&[1e300, 1e300]) <= 1.0);
    }

    #[test]
    fn tensor_residual_takes_worst_component() {
        let a = NumTensor::vector(&[1.0, 2.0]);
        let b = NumTensor::vector(&[-1.0, -1.0]);
        let r = tensor_residual(&[a.clone(), b.clone()], Scale::Normalized);
        assert!((r.value - 0.25).abs() < 1e-15);
        assert_eq!(r.magnitude, 2.0);
        assert_eq!(tensor_residual(&[a, b], Scale::Absolute).value, 1.0);
    }
}
