//! Poisson brackets, first-class and Jacobi checks, and constraint-basis
//! rebasing.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Calculus, Expr, Symbol, SymbolKind, Tape};
use crate::legendre::PullbackMap;
use crate::model::{Constraint, ModelSpec, SamplePoint, StructureFunctions};
use crate::system::GaugeSystem;

/// `{f, g} = Σ_i ∂f/∂q^i ∂g/∂p_i − ∂f/∂p_i ∂g/∂q^i`, summed over every
/// coordinate index that occurs in either argument.
pub fn poisson_bracket(f: &Expr, g: &Expr) -> Expr {
    bracket(&mut Calculus::new(), f, g)
}

pub(crate) fn bracket(calc: &mut Calculus, f: &Expr, g: &Expr) -> Expr {
    let mut pairs: BTreeSet<Symbol> = BTreeSet::new();
    for s in f.free_symbols().into_iter().chain(g.free_symbols()) {
        if matches!(s.kind(), SymbolKind::Coordinate | SymbolKind::Momentum) {
            pairs.insert(s.with_kind(SymbolKind::Coordinate));
        }
    }
    let mut terms = Vec::new();
    for q in pairs {
        let p = q.with_kind(SymbolKind::Momentum);
        let (fq, gp) = (calc.diff(f, &q), calc.diff(g, &p));
        if !fq.is_zero() && !gp.is_zero() {
            terms.push(fq * gp);
        }
        let (fp, gq) = (calc.diff(f, &p), calc.diff(g, &q));
        if !fp.is_zero() && !gq.is_zero() {
            terms.push(-(fp * gq));
        }
    }
    Expr::add(terms)
}

/// `{G_μ, G_ν}` for `μ < ν`.
#[derive(Clone, Debug)]
pub struct BracketTable {
    m: usize,
    upper: Vec<Expr>,
}

impl BracketTable {
    pub fn new(constraints: &[Expr]) -> Self {
        let mut calc = Calculus::new();
        let m = constraints.len();
        let mut upper = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                upper.push(bracket(&mut calc, &constraints[a], &constraints[b]));
            }
        }
        BracketTable { m, upper }
    }

    pub fn get(&self, mu: usize, nu: usize) -> Expr {
        if mu == nu {
            return Expr::zero();
        }
        let (a, b, sign) = if mu < nu { (mu, nu, false) } else { (nu, mu, true) };
        let k = a * (2 * self.m - a - 1) / 2 + (b - a - 1);
        if sign {
            -&self.upper[k]
        } else {
            self.upper[k].clone()
        }
    }
}

fn minor(mat: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    mat.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Cofactor expansion along the first row.
pub fn determinant(mat: &[Vec<Expr>]) -> Expr {
    match mat.len() {
        0 => Expr::one(),
        1 => mat[0][0].clone(),
        _ => Expr::add(
            (0..mat.len())
                .filter(|&j| !mat[0][j].is_zero())
                .map(|j| {
                    let t = &mat[0][j] * determinant(&minor(mat, 0, j));
                    if j % 2 == 1 {
                        -t
                    } else {
                        t
                    }
                })
                .collect(),
        ),
    }
}

fn inverse(mat: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>> {
    let det = determinant(mat);
    if det.is_zero() {
        return Err(Error::SingularRebase("determinant is identically zero".into()));
    }
    let inv_det = det.recip();
    let m = mat.len();
    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let c = determinant(&minor(mat, j, i));
                    let c = if (i + j) % 2 == 1 { -c } else { c };
                    c * &inv_det
                })
                .collect()
        })
        .collect())
}

/// Symbolic change of constraint basis `G'_μ = Λ_μ^α G_α` with the
/// transformed structure functions.
pub fn rebase_symbolic(spec: &ModelSpec, lambda: &[Vec<Expr>]) -> Result<ModelSpec> {
    let m = spec.m();
    if lambda.len() != m || lambda.iter().any(|r| r.len() != m) {
        return Err(Error::Invalid(format!("rebase matrix must be {m}x{m}")));
    }
    let inv = inverse(lambda)?;
    let mut calc = Calculus::new();
    let g = spec.constraint_exprs();
    let new_g: Vec<Expr> = (0..m).map(|mu| Expr::add((0..m).map(|a| &lambda[mu][a] * &g[a]).collect())).collect();
    // {G_α, Λ_ν^δ} and {Λ_μ^α, Λ_ν^δ}
    let gl: Vec<Vec<Vec<Expr>>> =
        (0..m).map(|a| (0..m).map(|nu| (0..m).map(|d| bracket(&mut calc, &g[a], &lambda[nu][d])).collect()).collect()).collect();
    let k = |calc: &mut Calculus, mu: usize, nu: usize, d: usize| -> Expr {
        let mut terms = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let c = spec.structure.get(a, b, d);
                if !c.is_zero() {
                    terms.push(&lambda[mu][a] * &lambda[nu][b] * c);
                }
            }
            terms.push(&lambda[mu][a] * &gl[a][nu][d]);
            terms.push(-(&lambda[nu][a] * &gl[a][mu][d]));
            terms.push(bracket(calc, &lambda[mu][a], &lambda[nu][d]) * &g[a]);
        }
        Expr::add(terms)
    };
    let mut structure = StructureFunctions::zero(m);
    for mu in 0..m {
        for nu in mu + 1..m {
            let kk: Vec<Expr> = (0..m).map(|d| (k(&mut calc, mu, nu, d) - k(&mut calc, nu, mu, d)).scale(crate::expr::Rational::HALF)).collect();
            for gamma in 0..m {
                let c = Expr::add((0..m).map(|d| &kk[d] * &inv[d][gamma]).collect());
                structure.set(mu, nu, gamma, c);
            }
        }
    }
    Ok(ModelSpec {
        constraints: spec.constraints.iter().zip(new_g).map(|(c, e)| Constraint { name: c.name.clone(), expr: e }).collect(),
        structure,
        rebase: None,
        ..spec.clone()
    })
}

/// Applies the model's own `rebase` block, if any.
pub fn effective_spec(spec: &ModelSpec) -> Result<ModelSpec> {
    match &spec.rebase {
        None => Ok(spec.clone()),
        Some(lam) => rebase_symbolic(&ModelSpec { rebase: None, ..spec.clone() }, lam),
    }
}

/// Minimum `|det Λ|` allowed at a sample point.
pub const REBASE_DET_TOL: f64 = 1e-6;

/// `min |det FL*Λ|` over the points.
pub fn rebase_det_margin(spec: &ModelSpec, lambda: &[Vec<Expr>], points: &[SamplePoint]) -> Result<f64> {
    let pm = PullbackMap::from_spec(spec);
    let det = pm.apply(&determinant(lambda));
    let tape = Tape::compile(&[det], &crate::verify::jet_symbols(&spec.coords))?;
    let mut worst = f64::INFINITY;
    for p in points {
        worst = worst.min(tape.eval(&crate::verify::jet_input(p))?[0].abs());
    }
    Ok(worst)
}

/// [`rebase_symbolic`] after checking `|det Λ| > 1e-6` at every point.
pub fn rebase(spec: &ModelSpec, lambda: &[Vec<Expr>], points: &[SamplePoint]) -> Result<ModelSpec> {
    let margin = rebase_det_margin(spec, lambda, points)?;
    if margin <= REBASE_DET_TOL {
        return Err(Error::SingularRebase(format!("|det| = {margin:e} at a sample point")));
    }
    rebase_symbolic(spec, lambda)
}

/// Worst residuals of the first-class conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstClassReport {
    /// `FL*{G_μ, G_ν}`
    pub pulled_brackets: f64,
    /// `FL*{H_c, G_μ}`
    pub hamiltonian_brackets: f64,
    /// `{G_μ, G_ν} − C_{μν}^γ G_γ` on the constraint surface.
    pub closure_on_surface: f64,
    /// Same at random off-surface phase-space points.
    pub closure_off_surface: f64,
}

pub fn first_class_check(spec: &ModelSpec, pm: &PullbackMap, points: &[SamplePoint]) -> Result<FirstClassReport> {
    let sys = GaugeSystem::with_pullback(spec, pm.clone())?;
    let ver = sys.verifier()?;
    let off = crate::verify::off_surface_points(&ver, points, crate::verify::OFF_SURFACE_SEED)?;
    let mut r = FirstClassReport { pulled_brackets: 0.0, hamiltonian_brackets: 0.0, closure_on_surface: 0.0, closure_off_surface: 0.0 };
    for p in points {
        let v = ver.at(p)?;
        r.pulled_brackets = r.pulled_brackets.max(v.residual("2.22")?.value);
        r.hamiltonian_brackets = r.hamiltonian_brackets.max(v.residual("2.23")?.value);
        r.closure_on_surface = r.closure_on_surface.max(v.residual("2.24")?.value);
    }
    for (q, p) in &off {
        r.closure_off_surface = r.closure_off_surface.max(ver.at_phase(q, p)?.closure().value);
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobiReport {
    /// Cyclic double bracket at off-surface points.
    pub double_bracket: f64,
    /// Pulled-back second-order combination.
    pub second_order: f64,
}

pub fn jacobi_checks(spec: &ModelSpec, points: &[SamplePoint]) -> Result<JacobiReport> {
    let sys = GaugeSystem::new(spec)?;
    let ver = sys.verifier()?;
    let off = crate::verify::off_surface_points(&ver, points, crate::verify::OFF_SURFACE_SEED)?;
    let mut r = JacobiReport { double_bracket: 0.0, second_order: 0.0 };
    for p in points {
        r.second_order = r.second_order.max(ver.at(p)?.residual("2.29")?.value);
    }
    for (q, p) in &off {
        r.double_bracket = r.double_bracket.max(ver.at_phase(q, p)?.jacobi().value);
    }
    Ok(r)
}
