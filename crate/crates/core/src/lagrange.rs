//! Velocity-space tensors of a Lagrangian: Hessian `W`, `α`, the
//! Euler-Lagrange residual `L_i`, the field `B`, and Noether residuals.

use crate::expr::{Calculus, Expr};
use crate::model::{ModelSpec, SamplePoint};
use crate::tensor::{IndexedExpr, Role};
use crate::verify::residual::normalized;

use Role::Coord as I;

/// Derivatives of `L(q, q̇)` needed downstream.
#[derive(Clone, Debug)]
pub struct LagrangianTensors {
    /// `∂L/∂q̇^i`
    pub momenta: IndexedExpr,
    /// `∂L/∂q^i`
    pub dl_dq: IndexedExpr,
    /// `W_{ij} = ∂²L/∂q̇^i∂q̇^j`
    pub hessian: IndexedExpr,
    /// `[i][j] = ∂²L/∂q̇^i∂q^j`
    pub mixed: IndexedExpr,
    pub alpha: IndexedExpr,
    /// `L_i = W_{ij} q̈^j − α_i`
    pub el_residual: IndexedExpr,
    pub b_field: IndexedExpr,
    /// `q̇^i ∂L/∂q̇^i − L`
    pub energy: Expr,
}

impl LagrangianTensors {
    pub fn new(spec: &ModelSpec, calc: &mut Calculus) -> Self {
        let n = spec.n();
        let c = &spec.coords;
        let l = &spec.lagrangian;
        let momenta = IndexedExpr::from_fn(&[I], n, 0, |ix| calc.diff(l, &c.v(ix[0])));
        let dl_dq = IndexedExpr::from_fn(&[I], n, 0, |ix| calc.diff(l, &c.q(ix[0])));
        let hessian = IndexedExpr::from_fn(&[I, I], n, 0, |ix| {
            if ix[0] <= ix[1] {
                calc.diff(momenta.get(&[ix[0]]), &c.v(ix[1]))
            } else {
                Expr::zero()
            }
        });
        // mirror the upper triangle so symmetry is structural
        let hessian = IndexedExpr::from_fn(&[I, I], n, 0, |ix| hessian.get(&[ix[0].min(ix[1]), ix[0].max(ix[1])]).clone());
        let mixed = IndexedExpr::from_fn(&[I, I], n, 0, |ix| calc.diff(momenta.get(&[ix[0]]), &c.q(ix[1])));
        let alpha = IndexedExpr::from_fn(&[I], n, 0, |ix| {
            let i = ix[0];
            let transport: Expr = (0..n).map(|l| Expr::symbol(c.v(l)) * mixed.get(&[i, l])).sum();
            dl_dq.get(&[i]) - transport
        });
        let el_residual = IndexedExpr::from_fn(&[I], n, 0, |ix| {
            let i = ix[0];
            let wa: Expr = (0..n).map(|j| hessian.get(&[i, j]) * Expr::symbol(c.a(j))).sum();
            wa - alpha.get(&[i])
        });
        let b_field = IndexedExpr::from_fn(&[I, I], n, 0, |ix| {
            if ix[0] == ix[1] {
                Expr::zero()
            } else {
                mixed.get(&[ix[0], ix[1]]) - mixed.get(&[ix[1], ix[0]])
            }
        });
        let energy = (0..n).map(|i| Expr::symbol(c.v(i)) * momenta.get(&[i])).sum::<Expr>() - l;
        LagrangianTensors { momenta, dl_dq, hessian, mixed, alpha, el_residual, b_field, energy }
    }
}

pub fn hessian(spec: &ModelSpec) -> IndexedExpr {
    LagrangianTensors::new(spec, &mut Calculus::new()).hessian
}

pub fn alpha(spec: &ModelSpec) -> IndexedExpr {
    LagrangianTensors::new(spec, &mut Calculus::new()).alpha
}

pub fn el_residual(spec: &ModelSpec) -> IndexedExpr {
    LagrangianTensors::new(spec, &mut Calculus::new()).el_residual
}

pub fn b_field(spec: &ModelSpec) -> IndexedExpr {
    LagrangianTensors::new(spec, &mut Calculus::new()).b_field
}

/// Worst normalized residuals of `R_μ^i α_i` and `R_μ^i L_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoetherResiduals {
    pub alpha: f64,
    pub el: f64,
}

/// Evaluates the Noether identities at `points` for generators `r` (m×n,
/// functions of q and q̇).
pub fn noether_check(spec: &ModelSpec, r: &IndexedExpr, points: &[SamplePoint]) -> crate::Result<NoetherResiduals> {
    let lt = LagrangianTensors::new(spec, &mut Calculus::new());
    let inputs = crate::verify::jet_symbols(&spec.coords);
    let bundle = crate::tensor::TensorBundle::compile(&[r, &lt.alpha, &lt.el_residual], &inputs)?;
    let mut scratch = Vec::new();
    let mut worst = NoetherResiduals { alpha: 0.0, el: 0.0 };
    let (m, n) = (r.shape()[0], spec.n());
    for p in points {
        let t = bundle.eval(&crate::verify::jet_input(p), &mut scratch)?;
        for mu in 0..m {
            let ra: Vec<f64> = (0..n).map(|i| t[0].at(&[mu, i]) * t[1].at(&[i])).collect();
            let rl: Vec<f64> = (0..n).map(|i| t[0].at(&[mu, i]) * t[2].at(&[i])).collect();
            worst.alpha = worst.alpha.max(normalized(&ra));
            worst.el = worst.el.max(normalized(&rl));
        }
    }
    Ok(worst)
}

