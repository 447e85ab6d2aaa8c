//! Model description files: parsing, rendering, sampling and validation.

mod parse;
mod render;
mod sample;
mod validate;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Coordinates, Expr};

pub use parse::parse_model;
pub use sample::{sample_points, SamplePoint, MAX_CONSECUTIVE_REJECTIONS, SAMPLE_BOX};
pub use validate::{validate_model, ValidationCheck, ValidationReport, VALIDATION_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("missing section: {0}")]
    MissingSection(&'static str),
    #[error("line {line}: {message}")]
    Arity { line: usize, message: String },
    #[error("line {line}: {section} may not depend on `{symbol}`")]
    WrongSpace { line: usize, section: &'static str, symbol: String },
    #[error("line {line}: duplicate constraint name `{name}`")]
    DuplicateConstraint { line: usize, name: String },
    #[error("line {line}: structure functions antisymmetric: {message}")]
    Antisymmetry { line: usize, message: String },
    #[error("domain-too-small: {0} consecutive samples rejected")]
    DomainTooSmall(usize),
}

/// A first-class constraint `G_μ(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: Expr,
}

/// Structure functions `C_{μν}^γ(q, p)` of the constraint algebra, stored
/// for `μ < ν` only so antisymmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunctions {
    m: usize,
    upper: BTreeMap<(usize, usize, usize), Expr>,
}

impl StructureFunctions {
    pub fn zero(m: usize) -> Self {
        StructureFunctions { m, upper: BTreeMap::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `C_{μν}^γ`, zero-based.
    pub fn get(&self, mu: usize, nu: usize, gamma: usize) -> Expr {
        match mu.cmp(&nu) {
            std::cmp::Ordering::Equal => Expr::zero(),
            std::cmp::Ordering::Less => self.upper.get(&(mu, nu, gamma)).cloned().unwrap_or_else(Expr::zero),
            std::cmp::Ordering::Greater => {
                self.upper.get(&(nu, mu, gamma)).map(|e| -e).unwrap_or_else(Expr::zero)
            }
        }
    }

    /// Sets `C_{μν}^γ` (and implicitly `C_{νμ}^γ = −C_{μν}^γ`).
    ///
    /// # Panics
    /// If `μ == ν` and `value` is not zero.
    pub fn set(&mut self, mu: usize, nu: usize, gamma: usize, value: Expr) {
        assert!(mu != nu || value.is_zero(), "diagonal structure function must vanish");
        let (key, value) = if mu < nu { ((mu, nu, gamma), value) } else { ((nu, mu, gamma), -value) };
        if mu == nu {
            return;
        }
        if value.is_zero() {
            self.upper.remove(&key);
        } else {
            self.upper.insert(key, value);
        }
    }

    /// Nonzero entries with `μ < ν`, zero-based.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Expr)> {
        self.upper.iter().map(|(&(a, b, c), e)| (a, b, c, e))
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_empty()
    }
}

/// A fully resolved model: Lagrangian, first-class constraints, their
/// algebra, canonical Hamiltonian and sampling domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub coords: Coordinates,
    pub lagrangian: Expr,
    pub constraints: Vec<Constraint>,
    pub structure: StructureFunctions,
    pub hamiltonian: Expr,
    /// Predicates `d(q, q̇) > 0`.
    pub domain: Vec<Expr>,
    /// `G'_a = Λ_a^b G_b`, applied on top of the constraints above.
    pub rebase: Option<Vec<Vec<Expr>>>,
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraint_exprs(&self) -> Vec<Expr> {
        self.constraints.iter().map(|c| c.expr.clone()).collect()
    }

    /// Serializes back to the model file format.
    pub fn render(&self) -> String {
        render::render(self)
    }
}
